"""Potential-side builders: exact soliton m-functions, ODE-shooting Weyl
functions, asymptotic-coefficient fits, and Jost-expansion recursions.

The shooting route integrates the scaled equation g'' = 2 z g' + q g for
g(x) = e^{x z} f(x), where f is the decaying solution at the shooting
end.  g stays O(1) along the whole backward sweep (the discarded mode
decays in the integration direction), so no overflow guard or Riccati
fallback is ever triggered; m(z) = z - g'(0)/g(0) equals -f'(0)/f(0).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_ivp

from .errors import ConfigError, SymbolError
from .spectral import MFunction

# ---------------------------------------------------------------------------
# exact soliton data
# ---------------------------------------------------------------------------


def soliton_m(kappa: float) -> MFunction:
    """m(z) = z - kappa^2/z, the Weyl data of q(x) = -2 kappa^2 sech^2(kappa x).

    The Laurent expansion terminates: m1 = -kappa^2 and all higher
    coefficients vanish, so the asymptotic list is exact at any order.
    """
    kappa = float(kappa)
    if not kappa > 0:
        raise ConfigError("soliton kappa must be positive")
    k2 = kappa * kappa

    def eval_m(z):
        z = np.asarray(z, dtype=complex)
        return z - k2 / z

    return MFunction(eval=eval_m, mu0=kappa,
                     asym=[-k2, 0.0, 0.0, 0.0, 0.0, 0.0],
                     real_flag=True, name=f"soliton(kappa={kappa:g})")


# ---------------------------------------------------------------------------
# potential specifications
# ---------------------------------------------------------------------------


def gaussian_bump(amplitude: float, width: float, center: float = 0.0):
    """q(x) = amplitude * exp(-((x-center)/width)^2)."""
    if not width > 0:
        raise ConfigError("bump width must be positive")

    def q(x):
        x = np.asarray(x, dtype=float)
        return amplitude * np.exp(-(((x - center) / width) ** 2))

    return q


def sech2_sum(kappas, shifts):
    """q(x) = -2 sum_j kappa_j^2 sech^2(kappa_j (x - shift_j))."""
    kappas = np.atleast_1d(np.asarray(kappas, dtype=float))
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
    if kappas.shape != shifts.shape:
        raise ConfigError("kappas and shifts must have equal length")
    if np.any(kappas <= 0):
        raise ConfigError("soliton kappas must be positive")

    def q(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for k, s in zip(kappas, shifts):
            out -= 2.0 * k * k / np.cosh(k * (x - s)) ** 2
        return out

    return q


def tabulated(x_samples, q_samples):
    """Cubic interpolant through (x, q) samples, zero outside the table."""
    from scipy.interpolate import CubicSpline
    x_samples = np.asarray(x_samples, dtype=float)
    q_samples = np.asarray(q_samples, dtype=float)
    if x_samples.ndim != 1 or x_samples.size < 4:
        raise ConfigError("tabulated potential needs at least 4 samples")
    if np.any(np.diff(x_samples) <= 0):
        raise ConfigError("tabulated x samples must be strictly increasing")
    spline = CubicSpline(x_samples, q_samples)
    lo, hi = x_samples[0], x_samples[-1]

    def q(x):
        x = np.asarray(x, dtype=float)
        out = np.where((x >= lo) & (x <= hi), spline(np.clip(x, lo, hi)),
                       0.0)
        return out

    return q


@dataclass(frozen=True)
class PotentialSpec:
    """A potential with its spectral lower bound and shooting cutoff.

    ``lambda0`` must be a finite negative lower bound of the Schrodinger
    operator (min q suffices); ``x_cut`` defaults to 30/sqrt(|lambda0|).
    """

    q: object
    lambda0: float
    name: str = "potential"
    x_cut: float = 0.0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.lambda0 < 0 and np.isfinite(self.lambda0)):
            raise ConfigError("lambda0 must be finite and negative")
        if self.x_cut <= 0:
            object.__setattr__(self, "x_cut",
                               30.0 / np.sqrt(abs(self.lambda0)))

    @staticmethod
    def from_config(cfg: dict) -> "PotentialSpec":
        """Build from a CLI config mapping with a ``kind`` selector."""
        kind = cfg.get("kind")
        x_cut = float(cfg.get("x_cut", 0.0))
        if kind == "soliton":
            kappa = float(cfg.get("kappa", 1.0))
            shift = float(cfg.get("x0", 0.0))
            q = sech2_sum([kappa], [shift])
            return PotentialSpec(q=q, lambda0=-kappa * kappa,
                                 name="soliton", x_cut=x_cut,
                                 params={"kappa": kappa, "x0": shift})
        if kind == "sech2_sum":
            kappas = [float(v) for v in cfg["kappas"]]
            shifts = [float(v) for v in cfg["shifts"]]
            q = sech2_sum(kappas, shifts)
            lam0 = float(cfg.get("lambda0", -2.0 * sum(k * k
                                                       for k in kappas)))
            return PotentialSpec(q=q, lambda0=lam0, name="sech2_sum",
                                 x_cut=x_cut,
                                 params={"kappas": kappas,
                                         "shifts": shifts})
        if kind == "gaussian_bump":
            amp = float(cfg.get("amplitude", -0.3))
            width = float(cfg.get("width", 1.5))
            center = float(cfg.get("center", 0.0))
            lam0 = float(cfg.get("lambda0", min(amp, -1e-3)))
            q = gaussian_bump(amp, width, center)
            return PotentialSpec(q=q, lambda0=lam0, name="gaussian_bump",
                                 x_cut=x_cut,
                                 params={"amplitude": amp, "width": width,
                                         "center": center})
        if kind == "tabulated":
            path = cfg["path"]
            data = np.loadtxt(path, delimiter=",", comments="#")
            if data.ndim != 2 or data.shape[1] < 2:
                raise ConfigError(
                    f"tabulated file {path} needs two CSV columns")
            q = tabulated(data[:, 0], data[:, 1])
            lam0 = float(cfg.get("lambda0", min(float(data[:, 1].min()),
                                                -1e-3)))
            return PotentialSpec(q=q, lambda0=lam0, name="tabulated",
                                 x_cut=x_cut, params={"path": str(path)})
        raise ConfigError(f"unknown potential kind: {kind!r}")


# ---------------------------------------------------------------------------
# Weyl functions by shooting
# ---------------------------------------------------------------------------


def weyl_from_ode(q, z: complex, X: float, rtol: float = 1e-11,
                  atol: float = 1e-13) -> complex:
    """m(z) = -f'(0)/f(0) for the solution decaying on the side sign(Re z).

    For Re z > 0 the decaying solution lives on [0, +inf); the integration
    runs backward from X with exact exponential tail data (q assumed
    negligible beyond X).  Re z < 0 mirrors from -X.  The scaled variable
    g = e^{x z} f is O(1) throughout, so the sweep is overflow-free and
    damps the contaminating mode.
    """
    z = complex(z)
    if z.real == 0.0:
        raise SymbolError("weyl_from_ode needs Re z != 0")
    side = 1.0 if z.real > 0 else -1.0
    x_end = side * float(X)

    def rhs(x, w):
        g, gp = w[0] + 1j * w[1], w[2] + 1j * w[3]
        gpp = 2.0 * z * gp + q(x) * g
        return [gp.real, gp.imag, gpp.real, gpp.imag]

    sol = solve_ivp(rhs, (x_end, 0.0), [1.0, 0.0, 0.0, 0.0],
                    method="RK45", rtol=rtol, atol=atol, dense_output=False)
    if not sol.success:
        raise SymbolError(f"shooting failed at z={z}: {sol.message}")
    g0 = sol.y[0, -1] + 1j * sol.y[1, -1]
    gp0 = sol.y[2, -1] + 1j * sol.y[3, -1]
    if abs(g0) < 1e-12:
        raise SymbolError(
            f"f(0) vanishes at z={z}: adjacent to an eigenvalue")
    return z - gp0 / g0


def mfunction_from_potential(spec: PotentialSpec, L: int = 6,
                             fit_points: int = 40,
                             radii=(4.0, 8.0)) -> tuple:
    """Shooting-backed MFunction with fitted asymptotic coefficients.

    Returns (MFunction, fit_residual).  The asymptotic list m_k comes
    from a real-coefficient least-squares fit of m(z) - z against
    sum_k m_k z^{-k} at ``fit_points`` points with Re z > 0 spread over
    the given radius range; the residual is the worst absolute misfit.
    """
    q, X = spec.q, spec.x_cut
    count = max(L - 2, 1)

    def eval_m(zs):
        arr = np.atleast_1d(np.asarray(zs, dtype=complex))
        out = np.array([weyl_from_ode(q, w, X) for w in arr])
        if np.isscalar(zs) or np.asarray(zs).ndim == 0:
            return out[0]
        return out

    rng = np.random.default_rng(12345)
    rr = rng.uniform(radii[0], radii[1], fit_points)
    th = rng.uniform(-0.44 * np.pi, 0.44 * np.pi, fit_points)
    zs = rr * np.exp(1j * th)
    vals = np.array([weyl_from_ode(q, w, X) for w in zs]) - zs
    cols = np.stack([zs ** (-k) for k in range(1, count + 1)], axis=1)
    A = np.concatenate([cols.real, cols.imag])
    b = np.concatenate([vals.real, vals.imag])
    mk, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.max(np.abs(cols @ mk - vals)))
    mf = MFunction(eval=eval_m, mu0=np.sqrt(abs(spec.lambda0)),
                   asym=[float(v) for v in mk], real_flag=True,
                   name=f"weyl({spec.name})")
    return mf, residual


# ---------------------------------------------------------------------------
# Jost expansion coefficients
# ---------------------------------------------------------------------------


def jost_coefficients(q, x_grid, count: int = 4, x_max: float = None,
                      num: int = 4001) -> tuple:
    """Arrays f_j(x) and c_j(x) of the Jost tail expansion.

    f_1 = -int_x^inf q, f_{j+1} = -f_j' - int_x^inf q f_j; c_1 = 0,
    c_2 = q/2, and c_j = (c_{j-1}' - sum_{l} c_l c_{j-l})/2 afterwards.
    Returns (F, C) with F[j-1, i] = f_j(x_i), C likewise, computed on an
    internal uniform grid reaching x_max (default: grid end + 25).
    """
    x_grid = np.atleast_1d(np.asarray(x_grid, dtype=float))
    if count < 1:
        raise SymbolError("need count >= 1 coefficients")
    lo = float(x_grid.min())
    hi = float(x_max) if x_max is not None else float(x_grid.max()) + 25.0
    if hi <= x_grid.max():
        raise SymbolError("x_max must exceed the evaluation grid")
    xs = np.linspace(lo, hi, num)
    h = xs[1] - xs[0]
    qv = np.asarray(q(xs), dtype=float)

    def tail_integral(values):
        rev = cumulative_trapezoid(values[::-1], dx=h, initial=0.0)
        return rev[::-1]

    F = np.empty((count, num))
    F[0] = -tail_integral(qv)
    for j in range(1, count):
        fp = np.gradient(F[j - 1], h, edge_order=2)
        F[j] = -fp - tail_integral(qv * F[j - 1])

    C = np.zeros((count, num))
    if count >= 2:
        C[1] = qv / 2.0
    for j in range(3, count + 1):
        conv = np.zeros(num)
        for small in range(2, j - 1):
            conv += C[small - 1] * C[j - small - 1]
        C[j - 1] = (np.gradient(C[j - 2], h, edge_order=2) - conv) / 2.0

    def sample(rows):
        out = np.empty((count, x_grid.size))
        for j in range(count):
            out[j] = np.interp(x_grid, xs, rows[j])
        return out

    return sample(F), sample(C)
