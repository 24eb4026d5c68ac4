"""Symmetric contour separating an interior region D+ from its exterior D-.

The curve consists of two branches x = +-w(y) with the even width profile
w(y) = c*(1+y^2)^(-(n-1)/2), truncated at |y| = y_max and closed by two short
horizontal cap segments.  The interior D+ contains the origin and the real
interval (-c, c); the curve is invariant under lam -> -lam and lam -> conj(lam)
and the node set realizes both symmetries exactly.

Quadrature is composite Gauss-Legendre: one panel per branch in a graded
parameter (sinh clustering near y = 0 by default, where Cauchy densities
vary fastest; a linear map when oscillatory exponent phases must be
resolved along the tails) and one panel per cap.  Because the discrete
curve is closed, Cauchy/residue identities for rational integrands hold to
quadrature accuracy rather than O(1/y_max), which the projection and
determinant layers rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContourError

TWO_PI_I = 2j * np.pi


# ---------------------------------------------------------------------------
# width profile
# ---------------------------------------------------------------------------

def width_profile(y, n, c):
    """Half-width w(y) = c*(1+y^2)^(-(n-1)/2) of D+ at height y."""
    y = np.asarray(y, dtype=float)
    return c * (1.0 + y * y) ** (-(n - 1) / 2.0)


def width_profile_deriv(y, n, c):
    """Derivative w'(y) of the width profile."""
    y = np.asarray(y, dtype=float)
    return -c * (n - 1) * y * (1.0 + y * y) ** (-(n + 1) / 2.0)


# ---------------------------------------------------------------------------
# contour container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    """One smooth panel of the contour.

    ``sl`` indexes the flat node arrays; ``sign`` is the orientation factor
    (+1 when the stored parameter increases along the anticlockwise
    traversal, -1 otherwise); ``gl_x``/``gl_w`` are the Gauss-Legendre nodes
    and weights on [-1, 1] used for the panel.
    """

    sl: slice
    sign: float
    gl_x: np.ndarray
    gl_w: np.ndarray


@dataclass(frozen=True, eq=False)
class Contour:
    """Discretized closed curve with oriented quadrature weights.

    Attributes
    ----------
    n, c, y_max : parameters of the curve family.
    node_count : branch node budget requested at construction (the two caps
        add ``cap_count`` nodes each; ``total_count`` is the array length).
    nodes : complex nodes lam_j, ordered [right branch (y ascending),
        left branch (y ascending), top cap (x ascending), bottom cap
        (x ascending)].
    weights : complex quadrature weights including the dlam factor and the
        anticlockwise orientation sign, so that
        (1/2pi i) * sum_j weights[j] * f(lam_j) approximates the Cauchy
        integral of f around D+.
    neg_index, conj_index : permutations realizing lam -> -lam and
        lam -> conj(lam) on the node set, exact by construction.
    pieces : the four smooth panels with their Gauss data (used by the
        boundary-projection layer for per-panel differentiation).
    dist_min : recommended minimum distance from the curve for off-curve
        Cauchy evaluation.
    """

    n: int
    c: float
    y_max: float
    node_count: int
    cap_count: int
    nodes: np.ndarray
    weights: np.ndarray
    neg_index: np.ndarray
    conj_index: np.ndarray
    pieces: tuple
    dist_min: float
    family: str = "canonical"
    grading: float = 0.0
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def total_count(self) -> int:
        return self.nodes.shape[0]

    @property
    def base_point(self) -> float:
        """Real point b = 3c in D-, the growth anchor for H_N(D+)."""
        return 3.0 * self.c


def _mirror_even(half):
    return np.concatenate([half[::-1], half])


def _mirror_odd(half):
    return np.concatenate([-half[::-1], half])


def _symmetric_gauss(m):
    """Gauss-Legendre rule on [-1, 1] with bit-exact node symmetry."""
    x, w = np.polynomial.legendre.leggauss(m)
    half = m // 2
    x = _mirror_odd(x[half:])
    w = _mirror_even(w[half:])
    return x, w


def build_contour(n: int, c: float, y_max: float, node_count: int,
                  cap_count: int | None = None,
                  dist_min: float | None = None,
                  grading: float | None = None) -> Contour:
    """Construct the discretized contour.

    Parameters
    ----------
    n : odd positive integer
        Decay degree of the width profile; bounds the polynomial degree of
        exponents the curve can absorb.
    c : positive float
        Width scale; D+ contains the real interval (-c, c).
    y_max : positive float
        Truncation height where the caps close the curve.
    node_count : int
        Total nodes on the two branches; must be a multiple of 4 and >= 8.
    cap_count : int, optional
        Nodes per cap (even); defaults to max(8, node_count // 32).
    dist_min : float, optional
        Off-curve evaluation guard distance; defaults to 0.05*c.
    grading : float, optional
        Branch node clustering strength: the branch parameter map is
        y = y_max*sinh(grading*v)/sinh(grading) on v in [-1, 1].  The
        default arcsinh(y_max/c) clusters nodes near y = 0 where Cauchy
        densities vary fastest; 0 gives the plain linear map, whose
        evenly spread Gauss nodes resolve high-frequency exponent phases
        (x*y + t*y^3) along the tails.

    Returns
    -------
    Contour
    """
    if n < 1 or n % 2 == 0:
        raise ContourError(f"n must be odd and positive, got {n}")
    if not (c > 0) or not (y_max > 0):
        raise ContourError("c and y_max must be positive")
    if node_count < 8 or node_count % 4 != 0:
        raise ContourError("node_count must be a multiple of 4 and >= 8")
    if cap_count is None:
        cap_count = max(8, node_count // 32)
    cap_count += cap_count % 2
    if dist_min is None:
        dist_min = 0.05 * c
    if grading is None:
        grading = float(np.arcsinh(y_max / c))
    if grading < 0:
        raise ContourError("grading must be nonnegative")

    mb = node_count // 2                      # nodes per branch

    gx_b, gw_b = _symmetric_gauss(mb)
    v_half = gx_b[mb // 2:]
    if grading < 1e-12:
        y_half = y_max * v_half
        dy_dv_half = np.full_like(v_half, y_max)
    else:
        scale = y_max / np.sinh(grading)
        y_half = scale * np.sinh(grading * v_half)
        dy_dv_half = scale * grading * np.cosh(grading * v_half)
    y = _mirror_odd(y_half)
    w_half = width_profile(y_half, n, c)
    w = _mirror_even(w_half)
    wp = _mirror_odd(width_profile_deriv(y_half, n, c))
    dy_dv = _mirror_even(dy_dv_half)

    # branch nodes and oriented weights (right branch runs upward: sign +1)
    right = w + 1j * y
    left = -w + 1j * y
    dlam_right = (wp + 1j) * dy_dv
    dlam_left = (-wp + 1j) * dy_dv
    w_right = gw_b * dlam_right
    w_left = -gw_b * dlam_left                # traversed downward

    # caps at y = +-y_max, full half-width at the truncation height
    wmax = float(width_profile(y_max, n, c))
    gx_c, gw_c = _symmetric_gauss(cap_count)
    x_half = wmax * gx_c[cap_count // 2:]
    x_cap = _mirror_odd(x_half)
    glw_c = wmax * gw_c
    top = x_cap + 1j * y_max
    bottom = x_cap - 1j * y_max
    w_top = -glw_c * np.ones(cap_count)       # right-to-left
    w_bottom = glw_c * np.ones(cap_count)     # left-to-right

    nodes = np.concatenate([right, left, top, bottom])
    weights = np.concatenate([w_right, w_left, w_top.astype(complex),
                              w_bottom.astype(complex)])

    j_b = np.arange(mb)
    j_c = np.arange(cap_count)
    r0, l0, t0, b0 = 0, mb, 2 * mb, 2 * mb + cap_count
    neg = np.empty(nodes.shape[0], dtype=np.intp)
    neg[r0 + j_b] = l0 + (mb - 1 - j_b)
    neg[l0 + j_b] = r0 + (mb - 1 - j_b)
    neg[t0 + j_c] = b0 + (cap_count - 1 - j_c)
    neg[b0 + j_c] = t0 + (cap_count - 1 - j_c)
    conj = np.empty_like(neg)
    conj[r0 + j_b] = r0 + (mb - 1 - j_b)
    conj[l0 + j_b] = l0 + (mb - 1 - j_b)
    conj[t0 + j_c] = b0 + j_c
    conj[b0 + j_c] = t0 + j_c

    pieces = (
        Piece(slice(r0, r0 + mb), +1.0, gx_b, gw_b),
        Piece(slice(l0, l0 + mb), -1.0, gx_b, gw_b),
        Piece(slice(t0, t0 + cap_count), -1.0, gx_c, gw_c),
        Piece(slice(b0, b0 + cap_count), +1.0, gx_c, gw_c),
    )

    return Contour(n=n, c=c, y_max=y_max, node_count=node_count,
                   cap_count=cap_count, nodes=nodes, weights=weights,
                   neg_index=neg, conj_index=conj, pieces=pieces,
                   dist_min=dist_min, grading=grading)


# ---------------------------------------------------------------------------
# quadrature helpers
# ---------------------------------------------------------------------------

def contour_integral(samples, contour: Contour) -> complex:
    """(1/2pi i) * closed-curve integral of a density given by node samples."""
    samples = np.asarray(samples)
    if samples.shape[0] != contour.total_count:
        raise ContourError(
            f"sample length {samples.shape[0]} does not match "
            f"{contour.total_count} nodes")
    if not np.all(np.isfinite(samples)):
        raise ContourError("non-finite sample in contour integral")
    return complex(np.dot(contour.weights, samples) / TWO_PI_I)


def residue_indicator(contour: Contour, z: complex) -> complex:
    """Winding indicator (1/2pi i) * integral of dlam/(lam - z).

    Close to 1 for z in D+, close to 0 for z in D-; intermediate values
    flag points too close to the curve.
    """
    return complex(np.dot(contour.weights,
                          1.0 / (contour.nodes - z)) / TWO_PI_I)


def region_of(contour: Contour, z: complex, tol: float = 1e-6) -> str:
    """Classify a point as 'plus', 'minus' or 'near-curve' by winding."""
    ind = residue_indicator(contour, z)
    if abs(ind - 1.0) < tol:
        return "plus"
    if abs(ind) < tol:
        return "minus"
    return "near-curve"


def tail_magnitude(contour: Contour, samples) -> float:
    """Largest |sample| on the caps and outermost branch nodes.

    Reported so callers can confirm their density actually decays at the
    truncation height; the quadrature itself has no way to know.
    """
    samples = np.asarray(samples)
    mb = contour.node_count // 2
    edge = [0, mb - 1, mb, 2 * mb - 1]
    caps = np.arange(2 * mb, contour.total_count)
    idx = np.concatenate([np.array(edge, dtype=np.intp), caps])
    return float(np.max(np.abs(samples[idx])))


def scale_contour(contour: Contour, sigma: float) -> Contour:
    """Scaled curve sigma*C; node values are exactly sigma times the input's.

    The image is a valid closed curve but no longer belongs to the canonical
    width-profile family (the profile would be sigma*w(y/sigma)), so the
    result is tagged ``family='scaled'``.
    """
    if not (sigma > 0):
        raise ContourError("sigma must be positive")
    return Contour(n=contour.n, c=sigma * contour.c,
                   y_max=sigma * contour.y_max,
                   node_count=contour.node_count,
                   cap_count=contour.cap_count,
                   nodes=sigma * contour.nodes,
                   weights=sigma * contour.weights,
                   neg_index=contour.neg_index,
                   conj_index=contour.conj_index,
                   pieces=contour.pieces,
                   dist_min=sigma * contour.dist_min,
                   family="scaled", grading=contour.grading)
