"""Independent verification tools: a periodic spectral KdV integrator and
a finite-difference Schrodinger residual.

The reference integrator deliberately belongs to a different
discretization family (periodic Fourier collocation with an
integrating-factor Runge-Kutta stepper) than the contour-integral flow
construction, so agreement between the two is evidence rather than
tautology.  The equation integrated is

    dq/dt = (1/4) q_xxx - (3/2) q q_x,

whose traveling one-soliton solution is q(t, x) = -2 sech^2(x + t).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import OracleError

__all__ = [
    "PeriodizedField",
    "kdv_reference_integrate",
    "schrodinger_residual",
    "dense_transfer_det",
]


# ---------------------------------------------------------------------------
# periodic field container
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodizedField:
    """Real samples of a field on a uniform periodic grid.

    Attributes
    ----------
    length : float
        Domain length; the grid covers [-length/2, length/2).
    samples : numpy.ndarray
        Real field values at the grid points.  The count must be a
        power of two so the spectral interpolant is cheap and exact.
    """

    length: float
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        n = samples.size
        if self.length <= 0.0:
            raise OracleError("domain length must be positive")
        if n < 8 or (n & (n - 1)) != 0:
            raise OracleError(
                f"sample count must be a power of two >= 8, got {n}")
        if not np.all(np.isfinite(samples)):
            raise OracleError("field samples must be finite")
        object.__setattr__(self, "samples", samples)

    @property
    def n(self) -> int:
        """Number of samples."""
        return self.samples.size

    @property
    def x_grid(self) -> np.ndarray:
        """Grid points, uniform on [-length/2, length/2)."""
        h = self.length / self.n
        return -0.5 * self.length + h * np.arange(self.n)

    @staticmethod
    def from_callable(q, length: float = 80.0,
                      n: int = 2048) -> "PeriodizedField":
        """Sample a callable potential on the periodic grid."""
        h = length / n
        x = -0.5 * length + h * np.arange(n)
        return PeriodizedField(length=float(length),
                               samples=np.asarray(q(x), dtype=float))

    def interp(self, x) -> np.ndarray:
        """Evaluate the spectral (trigonometric) interpolant at x."""
        x = np.asarray(x, dtype=float)
        coeff = np.fft.rfft(self.samples) / self.n
        k = 2.0 * np.pi / self.length * np.arange(coeff.size)
        shifted = x + 0.5 * self.length
        phases = np.exp(1j * np.outer(shifted, k))
        vals = phases @ coeff
        # one-sided spectrum: double every mode except DC and Nyquist
        vals = 2.0 * vals.real - coeff[0].real
        nyq = coeff[-1].real if self.n % 2 == 0 else 0.0
        vals -= nyq * np.cos(k[-1] * shifted)
        return vals if vals.shape else float(vals)


# ---------------------------------------------------------------------------
# reference KdV integrator
# ---------------------------------------------------------------------------


def kdv_reference_integrate(q0: PeriodizedField, T: float,
                            dt: float = 1e-4) -> PeriodizedField:
    """Integrate dq/dt = (1/4) q_xxx - (3/2) q q_x to time T.

    Fourier collocation in space with 2/3-rule dealiasing; classical
    fourth-order Runge-Kutta in time with the dispersive term handled
    exactly by an integrating factor (the linear phase is unimodular,
    so only the advective term constrains dt).

    Parameters
    ----------
    q0 : PeriodizedField
        Initial field.  Must vanish at the periodic boundary
        (|q| < 1e-10 at the edge samples).
    T : float
        Final time (T >= 0).
    dt : float
        Requested time step; the actual step divides T exactly.

    Returns
    -------
    PeriodizedField
        The field at time T on the same grid.

    Raises
    ------
    OracleError
        If the field touches the boundary, dt violates the advective
        CFL bound, or the solution blows up mid-run.
    """
    if T < 0.0:
        raise OracleError("T must be non-negative")
    if dt <= 0.0:
        raise OracleError("dt must be positive")
    edge = max(abs(q0.samples[0]), abs(q0.samples[-1]))
    if edge >= 1e-10:
        raise OracleError(
            f"field not separated from the periodic boundary: "
            f"|q|={edge:.3e} at the edge (need < 1e-10)")
    if T == 0.0:
        return q0

    n = q0.n
    length = q0.length
    steps = max(1, int(round(T / dt)))
    h_t = T / steps

    k = 2.0 * np.pi / length * np.fft.rfftfreq(n) * n
    k_max = k[-1]
    amp = float(np.max(np.abs(q0.samples)))
    cfl_limit = 2.0 / max(1.5 * amp * k_max, 1e-300)
    if h_t > cfl_limit:
        raise OracleError(
            f"dt={h_t:.3e} violates the advective CFL bound "
            f"{cfl_limit:.3e} for max|q|={amp:.3g}")

    # integrating factor for L = (1/4)(ik)^3 = -(i/4)k^3
    lin = -0.25j * k ** 3
    E = np.exp(lin * (0.5 * h_t))
    E2 = E * E
    # 2/3-rule dealias mask for the quadratic term
    mask = (np.arange(k.size) <= (n // 3)).astype(float)

    def nonlin(v_hat):
        q = np.fft.irfft(v_hat, n=n)
        prod_hat = np.fft.rfft(q * q) * mask
        return -0.75j * k * prod_hat

    v = np.fft.rfft(q0.samples)
    check_every = max(1, steps // 64)
    for step in range(steps):
        k1 = h_t * nonlin(v)
        k2 = h_t * nonlin(E * (v + 0.5 * k1))
        k3 = h_t * nonlin(E * v + 0.5 * k2)
        k4 = h_t * nonlin(E2 * v + E * k3)
        v = E2 * v + (E2 * k1 + 2.0 * E * (k2 + k3) + k4) / 6.0
        if (step + 1) % check_every == 0 or step == steps - 1:
            peak = np.max(np.abs(np.fft.irfft(v, n=n)))
            if not np.isfinite(peak) or peak > 1e3:
                t_now = (step + 1) * h_t
                raise OracleError(
                    f"blow-up detected at t={t_now:.6g}: max|q|={peak:.3g}")
    return PeriodizedField(length=length, samples=np.fft.irfft(v, n=n))


# ---------------------------------------------------------------------------
# Schrodinger residual
# ---------------------------------------------------------------------------

_D2_6TH = np.array([1.0 / 90.0, -3.0 / 20.0, 1.5, -49.0 / 18.0,
                    1.5, -3.0 / 20.0, 1.0 / 90.0])


def schrodinger_residual(f_samples, x_grid, q, z) -> float:
    """Relative residual of -f'' + q f + z^2 f on a uniform grid.

    Parameters
    ----------
    f_samples : array_like
        Samples of a candidate solution f on x_grid (may be complex).
    x_grid : array_like
        Uniform grid with at least 7 points.
    q : callable
        Potential evaluated vectorially on x_grid.
    z : complex
        Spectral parameter; the equation reads -f'' + q f = -z^2 f.

    Returns
    -------
    float
        max over interior points of |-f'' + q f + z^2 f| / max |f|,
        with the second derivative from the 6th-order central stencil.
    """
    f = np.asarray(f_samples, dtype=complex)
    x = np.asarray(x_grid, dtype=float)
    if f.shape != x.shape or f.ndim != 1:
        raise OracleError("f_samples and x_grid must be 1-D and congruent")
    if x.size < 7:
        raise OracleError("need at least 7 grid points for the "
                          "6th-order stencil")
    h = x[1] - x[0]
    if h <= 0 or np.max(np.abs(np.diff(x) - h)) > 1e-12 * max(abs(h), 1.0):
        raise OracleError("x_grid must be uniform and increasing")
    d2 = np.zeros(x.size - 6, dtype=complex)
    for j, c in enumerate(_D2_6TH):
        d2 += c * f[j:j + d2.size]
    d2 /= h * h
    mid = slice(3, x.size - 3)
    resid = -d2 + (np.asarray(q(x[mid]), dtype=complex)
                   + complex(z) ** 2) * f[mid]
    scale = float(np.max(np.abs(f)))
    if scale == 0.0:
        raise OracleError("f is identically zero")
    return float(np.max(np.abs(resid))) / scale


# ---------------------------------------------------------------------------
# brute-force determinant
# ---------------------------------------------------------------------------


def hardy_polynomial_basis(contour, dim: int) -> tuple:
    """Orthonormal polynomial basis of the discrete Hardy space.

    Polynomials are dense in the Hardy space of the bounded interior
    region, so Arnoldi orthonormalization of 1, lam, lam^2, ... under
    the quadrature measure |w| yields an explicit basis of its node
    discretization.  Returns (V, sq) with V the (nodes x dim) basis
    columns and sq the square root of the positive weights; columns
    satisfy (sq V)^H (sq V) = I.
    """
    lam = np.asarray(contour.nodes)
    if dim < 1 or dim > lam.size:
        raise OracleError(f"basis dim {dim} out of range 1..{lam.size}")
    sq = np.sqrt(np.abs(np.asarray(contour.weights)))
    V = np.zeros((lam.size, dim), dtype=complex)
    v = np.ones(lam.size, dtype=complex)
    V[:, 0] = v / np.linalg.norm(sq * v)
    for j in range(1, dim):
        v = lam * V[:, j - 1]
        for _pass in range(2):
            for i in range(j):
                v = v - V[:, i] * np.vdot(sq * V[:, i], sq * v)
        nrm = np.linalg.norm(sq * v)
        if nrm < 1e-250:
            raise OracleError(f"basis collapsed at degree {j}")
        V[:, j] = v / nrm
    return V, sq


def dense_transfer_det(r, symbol, contour, N: int = 2, g=None,
                       dim: int = None) -> complex:
    """det of the discretized r^{-1} T(r g a) T(g a)^{-1} by dense algebra.

    Builds both Toeplitz matrices with the generic assembler, forms the
    full transfer matrix with plain LU solves and the diagonal of 1/r,
    and takes the determinant of its compression onto an explicit
    polynomial basis of the discrete Hardy space.  The compression is
    essential: on the node space the assembled operators extend T
    beyond the Hardy subspace, and the poles of r break the complement
    cancellation by residue terms, leaving a resolution-independent
    spurious factor in the raw full-space determinant.

    Convergence in ``dim`` is geometric at a rate set by the conformal
    distance of the data of r from the interior region, so squat
    contours (moderate y_max) and data well inside D- converge fastest.
    No closed-form tau evaluation is involved; the result is an
    independent cross-check of the rational tau path.
    """
    from .toeplitz import assemble_toeplitz

    lam = contour.nodes
    r_vals = np.asarray(r.eval_at(lam), dtype=complex)
    if np.any(np.abs(r_vals) < 1e-300):
        raise OracleError("r vanishes at a contour node")
    if dim is None:
        dim = min(120, contour.total_count // 4)
    g_vals = (np.ones(lam.size, dtype=complex) if g is None
              else np.asarray(g, dtype=complex))
    m_rga = assemble_toeplitz(symbol, g_vals * r_vals, contour, N)
    m_ga = assemble_toeplitz(symbol, None if g is None else g_vals,
                             contour, N)
    transfer = np.linalg.solve(m_ga, m_rga / r_vals[:, None])
    V, sq = hardy_polynomial_basis(contour, dim)
    comp = (sq[:, None] * V).conj().T @ (sq[:, None] * (transfer @ V))
    return complex(np.linalg.det(comp))
