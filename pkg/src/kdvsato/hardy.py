"""Hardy-space projections on the contour.

H(D+) and H(D-) are the closures in L^2(C) of rational functions pole-free
in D+ and D- respectively; H_N(D+) = (z-b)^N H(D+) allows polynomial growth
of order N, anchored at the real base point b = 3c in D-.

Boundary (on-curve) values of the plus projection are computed by a closed
Nystrom matrix built from the Plemelj half-jump plus a singularity-subtracted
principal value; the subtraction's diagonal needs the density derivative
along the curve, which is taken spectrally per smooth panel.  Off-curve
values are plain Cauchy sums, exact for rational data because the discrete
curve is closed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import cauchy_targets
from .contour import Contour, TWO_PI_I
from .errors import ProjectionError

# ---------------------------------------------------------------------------
# boundary projection matrix
# ---------------------------------------------------------------------------


def differentiation_matrix(x, w):
    """Barycentric differentiation matrix on Gauss-Legendre nodes.

    Uses the numerically stable closed-form barycentric weights for Gauss
    nodes, beta_j = (-1)^j * sqrt((1-x_j^2) * w_j), which avoids the
    overflowing product formula at high orders.
    """
    m = x.shape[0]
    beta = np.sqrt((1.0 - x * x) * w)
    beta[1::2] *= -1.0
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    d = (beta[None, :] / beta[:, None]) / diff
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))
    return d


def boundary_projection_matrix(contour: Contour) -> np.ndarray:
    """Dense matrix K with (K f)(lam_i) = boundary value of p_plus(f).

    Satisfies K @ 1 = 1, reproduces sampled H_N(D+) data after growth
    normalization, and annihilates sampled H(D-) data.  The minus
    projection is I - K.  Cached on the contour.
    """
    cached = contour._cache.get("proj")
    if cached is not None:
        return cached

    lam = contour.nodes
    w = contour.weights
    m = contour.total_count

    diff = lam[None, :] - lam[:, None]
    np.fill_diagonal(diff, 1.0)
    k_off = w[None, :] / diff
    np.fill_diagonal(k_off, 0.0)
    row_sums = k_off.sum(axis=1)

    corr = k_off - np.diag(row_sums)
    # singularity-subtraction diagonal: W_i * f'(lam_i) reduces to the
    # normalized panel derivative, scaled by orientation and GL weight only
    for piece in contour.pieces:
        sl = piece.sl
        block = (piece.sign * piece.gl_w)[:, None] * \
            differentiation_matrix(piece.gl_x, piece.gl_w)
        corr[sl, sl] += block

    k = np.eye(m, dtype=complex) + corr / TWO_PI_I
    contour._cache["proj"] = k
    return k


def minus_projection_matrix(contour: Contour) -> np.ndarray:
    return np.eye(contour.total_count, dtype=complex) - \
        boundary_projection_matrix(contour)


# ---------------------------------------------------------------------------
# boundary functions
# ---------------------------------------------------------------------------

@dataclass
class BoundaryFunction:
    """Node samples of a function together with its claimed space.

    space_tag is one of 'H_plus', 'H_minus', 'L2'; N is the growth index
    (meaningful for 'H_plus' and 'L2').
    """

    contour: Contour
    values: np.ndarray
    space_tag: str = "L2"
    N: int = 0

    def defect(self) -> float:
        """Relative membership defect of the claimed space tag."""
        return membership_defect(self.values, self.contour,
                                 self.space_tag, self.N)


def quadrature_norm(values, contour: Contour) -> float:
    """L^2(C) norm of node samples with the |dlam| measure."""
    return float(np.sqrt(np.sum(np.abs(contour.weights) *
                                np.abs(values) ** 2)))


def membership_defect(values, contour: Contour, space_tag: str,
                      N: int = 0) -> float:
    """Relative size of the component lying in the complementary space."""
    values = np.asarray(values, dtype=complex)
    k = boundary_projection_matrix(contour)
    if space_tag == "H_plus":
        norm = (contour.nodes - contour.base_point) ** N
        scaled = values / norm
        resid = scaled - k @ scaled
    elif space_tag == "H_minus":
        resid = k @ values
        scaled = values
    else:
        raise ProjectionError(f"no membership test for space {space_tag!r}")
    denom = quadrature_norm(scaled, contour)
    if denom == 0.0:
        return 0.0
    return quadrature_norm(resid, contour) / denom


def even_odd_split(values, contour: Contour):
    """Split node samples into even and odd parts under lam -> -lam."""
    values = np.asarray(values)
    flipped = values[contour.neg_index]
    return 0.5 * (values + flipped), 0.5 * (values - flipped)


# ---------------------------------------------------------------------------
# off-curve evaluation
# ---------------------------------------------------------------------------

def project(values, contour: Contour, side: str, z, N: int = 0):
    """Cauchy projection of boundary samples, evaluated off the curve.

    Parameters
    ----------
    values : (M,) complex samples aligned with the contour nodes.
    side : 'plus' or 'minus'
        Which Hardy component to evaluate; the target z must lie in the
        matching region (D+ for 'plus', D- for 'minus').
    z : complex scalar or array of targets.
    N : growth index for the plus side; data growing like |lam|^N is
        normalized by (lam-b)^N before the Cauchy sum and denormalized
        after, which keeps the integrand square-integrable.

    Returns
    -------
    complex scalar or ndarray matching the shape of z.
    """
    values = np.asarray(values, dtype=complex)
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    dist = np.min(np.abs(contour.nodes[None, :] - z_arr[:, None]), axis=1)
    if np.any(dist < contour.dist_min):
        bad = z_arr[dist < contour.dist_min][0]
        raise ProjectionError(
            f"target {bad} is within dist_min of the contour")

    if side == "plus":
        if N:
            norm = (contour.nodes - contour.base_point) ** N
            vals = cauchy_targets(contour.nodes,
                                  contour.weights * values / norm, z_arr)
            out = vals * (z_arr - contour.base_point) ** N
        else:
            out = cauchy_targets(contour.nodes, contour.weights * values,
                                 z_arr)
    elif side == "minus":
        out = -cauchy_targets(contour.nodes, contour.weights * values,
                              z_arr)
    else:
        raise ProjectionError(f"unknown side {side!r}")
    if np.isscalar(z) or np.asarray(z).ndim == 0:
        return complex(out[0])
    return out
