"""The KdV flow: potentials from symbol evolution, Baker-Akhiezer
functions, asymptotic-coefficient recurrences, and the tau representation.

The flow K(g) acts on a vector symbol by multiplication with
g(z) = r(z) e^{h(z)} (rational factor times the exponential of a real odd
polynomial).  The potential at position x is

    q(x) = -2 s_1'(x),    s_k(x) = (1/2pi i) oint lam^{k-1} G atilde u_x,

with G = e^{x lam} g(lam) and u_x the solution of T(e_x g a) u_x = 1.
The derivative s_1' is itself a quadrature: the analytic derivative of
the solve is d/dx u_x = -T^{-1} T(z e_x g a) u_x, so no finite
differencing enters the headline output.

log tau(g e_x) differences are produced by Gauss integration of
kappa1(e_xi g a), whose x-derivative identity makes the 5-point stencil
of tau_representation_q accurate to rounding error; the dense logdet
route carries a smooth node-count-independent bias whose curvature is
far above the target tolerance (see the tau module notes).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_solve

from .contour import Contour, contour_integral, region_of
from .errors import FlowSingularityError, SymbolError
from .hardy import even_odd_split
from .spectral import CharacteristicData, characteristic_functions
from .tau import RationalFactor, validate_factor_region
from .toeplitz import VectorSymbol, assemble_toeplitz, evaluate_group

# ---------------------------------------------------------------------------
# group elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupElement:
    """Multiplier g(z) = r(z) exp(h(z)) with h real, odd, of low degree.

    ``h_coeffs[j]`` is the coefficient of z^{2j+1}; the rational part
    carries its zeros and poles in D-.
    """

    rational: RationalFactor = field(default_factory=RationalFactor.one)
    h_coeffs: tuple = ()

    @staticmethod
    def one() -> "GroupElement":
        return GroupElement()

    @staticmethod
    def from_x(x: float) -> "GroupElement":
        """Translation element e_x with h(z) = x z."""
        return GroupElement(h_coeffs=(float(x),))

    @staticmethod
    def from_tx(t: float, x: float) -> "GroupElement":
        """KdV element e_{t,x} with h(z) = x z + t z^3."""
        return GroupElement(h_coeffs=(float(x), float(t)))

    @property
    def degree(self) -> int:
        deg = 0
        for j, h in enumerate(self.h_coeffs):
            if h != 0.0:
                deg = 2 * j + 1
        return deg

    @property
    def is_real(self) -> bool:
        return self.rational.is_real and all(
            abs(complex(h).imag) == 0.0 for h in self.h_coeffs)

    def h_at(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for j, h in enumerate(self.h_coeffs):
            if h != 0.0:
                out = out + h * z ** (2 * j + 1)
        return out

    def eval_at(self, z):
        z = np.asarray(z, dtype=complex)
        return self.rational.eval_at(z) * np.exp(self.h_at(z))

    def __call__(self, z):
        return self.eval_at(z)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        n = max(len(self.h_coeffs), len(other.h_coeffs))
        a = list(self.h_coeffs) + [0.0] * (n - len(self.h_coeffs))
        b = list(other.h_coeffs) + [0.0] * (n - len(other.h_coeffs))
        return GroupElement(rational=self.rational * other.rational,
                            h_coeffs=tuple(x + y for x, y in zip(a, b)))

    def shifted_by_x(self, x: float) -> "GroupElement":
        return self * GroupElement.from_x(x)

    def validate(self, contour: Contour, bound: float = 1e12) -> None:
        """Degree within the contour's class, data in D-, bounded values."""
        if self.degree > contour.n:
            raise SymbolError(
                f"h degree {self.degree} exceeds contour n={contour.n}")
        validate_factor_region(self.rational, contour)
        vals = np.abs(self.eval_at(contour.nodes))
        if not np.all(np.isfinite(vals)) or vals.max() > bound:
            raise SymbolError("group element unbounded on the contour")

    def describe(self) -> str:
        terms = [f"{h:g} z^{2 * j + 1}" for j, h in
                 enumerate(self.h_coeffs) if h != 0.0]
        hs = " + ".join(terms) if terms else "0"
        return f"{self.rational.describe()} * exp({hs})"


def group_values(g, contour_or_nodes):
    """Node samples of a group datum (None, scalar 1, GroupElement,
    RationalFactor, callable, or precomputed array)."""
    nodes = getattr(contour_or_nodes, "nodes", contour_or_nodes)
    return evaluate_group(g, np.asarray(nodes, dtype=complex))


# ---------------------------------------------------------------------------
# potential extraction
# ---------------------------------------------------------------------------


@dataclass
class FlowPoint:
    """Potential data of a single (g, x) evaluation."""

    x: float
    q: float
    kappa1: complex
    s: np.ndarray
    s1_prime: complex
    tau_abs: float
    residual: float
    status: str = "ok"


def _lu_logabsdet(lu) -> float:
    return float(np.sum(np.log(np.abs(np.diag(lu[0])))))


@dataclass
class FlowWorkspace:
    """Shared read-only data for repeated solves on one contour."""

    symbol: VectorSymbol
    contour: Contour
    N: int
    base_logabsdet: float

    @staticmethod
    def build(symbol: VectorSymbol, contour: Contour,
              N: int = 2) -> "FlowWorkspace":
        base = assemble_toeplitz(symbol, None, contour, N)
        sign, logabs = np.linalg.slogdet(base)
        return FlowWorkspace(symbol=symbol, contour=contour, N=N,
                             base_logabsdet=float(logabs))


def kdv_potential(symbol: VectorSymbol, g, x: float, contour: Contour,
                  N: int = 2, workspace: FlowWorkspace = None) -> FlowPoint:
    """Potential q(x), kappa1, and the moments s_k of the flowed symbol.

    ``g`` is the group element applied on top of the translation e_x; the
    derivative of s_1 uses the analytic solve-derivative, and tau_abs is
    the plain-determinant magnitude |tau(e_x g)| for diagnostics.
    """
    if workspace is None:
        workspace = FlowWorkspace.build(symbol, contour, N)
    ct, lam = contour, contour.nodes
    gv = group_values(g, lam) * np.exp(x * lam)
    try:
        cd = characteristic_functions(symbol, ct, N=N, g=gv)
    except FlowSingularityError as exc:
        raise FlowSingularityError(str(exc), where=("g", x),
                                   rcond=exc.rcond) from exc

    count = max(symbol.L - 2, 1)
    s = np.array([cd.moment(k) for k in range(1, count + 1)])

    m_z = assemble_toeplitz(symbol, gv * lam, ct, N)
    du = -lu_solve(cd.lu, m_z @ cd.u)

    smp = symbol.samples(ct)
    ue, uo = even_odd_split(cd.u, ct)
    due, duo = even_odd_split(du, ct)
    density = gv * (lam * (smp["at1"] * ue + smp["at2"] * uo) +
                    (smp["at1"] * due + smp["at2"] * duo))
    s1p = contour_integral(density, ct)

    q = -2.0 * s1p.real
    residual = max(cd.residual, abs(s1p.imag))
    tau_abs = float(np.exp(_lu_logabsdet(cd.lu) - workspace.base_logabsdet -
                           np.sum(np.log(np.abs(gv)))))
    return FlowPoint(x=float(x), q=float(q), kappa1=complex(cd.kappa1),
                     s=s, s1_prime=complex(s1p), tau_abs=tau_abs,
                     residual=float(residual))


@dataclass
class FlowResult:
    """Grid output of the flow: potential, moments, diagnostics."""

    t_grid: np.ndarray
    x_grid: np.ndarray
    q: np.ndarray
    kappa1: np.ndarray
    s: np.ndarray
    tau_abs: np.ndarray
    residual: np.ndarray
    status: list

    def point_status(self, i: int, j: int) -> str:
        return self.status[i][j]


def _thread_count(threads) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("KDV_SATO_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def kdv_solution_grid(symbol: VectorSymbol, h_coeffs, t_grid, x_grid,
                      contour: Contour, N: int = 2,
                      threads=None) -> FlowResult:
    """q(t, x) on a grid for the flow generated by the odd polynomial h.

    Each grid point is an independent solve; singular points (tau = 0)
    are marked in the status table and carry NaN values instead of
    aborting the grid.
    """
    h_coeffs = tuple(float(h) for h in np.atleast_1d(h_coeffs))
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    x_grid = np.atleast_1d(np.asarray(x_grid, dtype=float))
    generator = GroupElement(h_coeffs=h_coeffs)
    generator.validate(contour)
    if symbol.L < max(generator.degree + 1, 4):
        raise SymbolError(
            f"flow of degree {generator.degree} needs L >= "
            f"{max(generator.degree + 1, 4)}, got {symbol.L}")

    workspace = FlowWorkspace.build(symbol, contour, N)
    symbol.samples(contour)
    nt, nx = t_grid.size, x_grid.size
    count = max(symbol.L - 2, 1)
    q = np.full((nt, nx), np.nan)
    kappa1 = np.full((nt, nx), np.nan + 0j, dtype=complex)
    s = np.full((nt, nx, count), np.nan + 0j, dtype=complex)
    tau_abs = np.full((nt, nx), np.nan)
    residual = np.full((nt, nx), np.nan)
    status = [["ok"] * nx for _ in range(nt)]

    def run_point(ij):
        i, j = ij
        g_t = GroupElement(h_coeffs=tuple(t_grid[i] * h for h in h_coeffs))
        try:
            pt = kdv_potential(symbol, g_t, x_grid[j], contour, N=N,
                               workspace=workspace)
        except FlowSingularityError as exc:
            return i, j, None, f"singular (rcond {exc.rcond:.1e})"
        return i, j, pt, "ok"

    jobs = [(i, j) for i in range(nt) for j in range(nx)]
    workers = _thread_count(threads)
    if workers == 1:
        results = map(run_point, jobs)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_point, jobs))
    for i, j, pt, tag in results:
        status[i][j] = tag
        if pt is None:
            continue
        q[i, j] = pt.q
        kappa1[i, j] = pt.kappa1
        s[i, j, :] = pt.s
        tau_abs[i, j] = pt.tau_abs
        residual[i, j] = pt.residual
    return FlowResult(t_grid=t_grid, x_grid=x_grid, q=q, kappa1=kappa1,
                      s=s, tau_abs=tau_abs, residual=residual,
                      status=status)


# ---------------------------------------------------------------------------
# Baker-Akhiezer functions
# ---------------------------------------------------------------------------


def baker_akhiezer(symbol: VectorSymbol, g, x: float, z,
                   contour: Contour, N: int = 2):
    """f(x, z) = e^{-x z} (1 + phi_{e_x g a}(z)) for z in D-."""
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    for w in zs:
        if region_of(contour, w) != "minus":
            raise SymbolError(f"evaluation point {w} not in D-")
    gv = group_values(g, contour) * np.exp(x * contour.nodes)
    cd = characteristic_functions(symbol, contour, N=N, g=gv)
    vals = np.exp(-x * zs) * (1.0 + np.atleast_1d(cd.phi_at(zs)))
    return vals[0] if np.isscalar(z) or np.asarray(z).ndim == 0 else vals


# ---------------------------------------------------------------------------
# recurrence of the asymptotic coefficients
# ---------------------------------------------------------------------------

_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def _stencil(values: np.ndarray, coeffs: np.ndarray, h: float,
             power: int) -> np.ndarray:
    n = values.shape[-1]
    out = np.zeros(values.shape[:-1] + (n - 4,), dtype=values.dtype)
    for k, c in enumerate(coeffs):
        out += c * values[..., k:n - 4 + k]
    return out / h ** power


def recurrence_residual(s: np.ndarray, x_grid) -> float:
    """Worst interior defect of s_k'' + 2 s_1' s_k - 2 s_{k+1}' = 0.

    ``s[k-1, i]`` holds s_k(x_i) on a uniform grid; fourth-order central
    differences are used, so the result converges like h^4.
    """
    x_grid = np.asarray(x_grid, dtype=float)
    if x_grid.size < 5:
        raise SymbolError("recurrence check needs at least 5 grid points")
    h = x_grid[1] - x_grid[0]
    if not np.allclose(np.diff(x_grid), h, rtol=1e-10, atol=1e-12):
        raise SymbolError("recurrence check needs a uniform grid")
    s = np.asarray(s, dtype=complex)
    if s.shape[0] < 2:
        raise SymbolError("need s_k up to k = 2 for the recurrence")
    s1p = _stencil(s[0], _D1, h, 1)
    worst = 0.0
    for k in range(s.shape[0] - 1):
        skpp = _stencil(s[k], _D2, h, 2)
        sk1p = _stencil(s[k + 1], _D1, h, 1)
        mid = s[k][2:-2]
        defect = np.max(np.abs(skpp + 2.0 * s1p * mid - 2.0 * sk1p))
        worst = max(worst, float(defect))
    return worst


# ---------------------------------------------------------------------------
# tau representation of the potential
# ---------------------------------------------------------------------------

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(6)


def log_tau_ratio(symbol: VectorSymbol, g, contour: Contour,
                  x0: float, x1: float, N: int = 2) -> complex:
    """log tau(g e_{x1}) - log tau(g e_{x0}) by integrating kappa1.

    Uses the derivative identity d/dx log tau(g e_x) = kappa1(e_x g a)
    with 6-point Gauss quadrature on [x0, x1]; exact to rounding error
    for the analytic integrand.
    """
    gv = group_values(g, contour)
    lam = contour.nodes
    panels = max(1, int(np.ceil(abs(x1 - x0) / 0.05)))
    edges = np.linspace(x0, x1, panels + 1)
    total = 0.0 + 0.0j
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        for t, w in zip(_GAUSS_X, _GAUSS_W):
            xi = mid + half * t
            cd = characteristic_functions(symbol, contour, N=N,
                                          g=gv * np.exp(xi * lam))
            total += half * w * cd.kappa1
    return total


def tau_representation_q(symbol: VectorSymbol, g, x: float, step: float,
                         contour: Contour, N: int = 2) -> float:
    """-2 times the 5-point second central difference of log tau(g e_x).

    The stencil values are genuine log-tau differences; they are produced
    by Gauss integration of kappa1 between the abscissae (the exact
    x-derivative of log tau), which evaluates the same function without
    the dense determinant's quadrature bias.  A zero of tau inside the
    stencil surfaces as a solve failure and is reported with its
    location.
    """
    if step <= 0:
        raise SymbolError("stencil step must be positive")
    offsets = (-2, -1, 1, 2)
    logs = {0: 0.0 + 0.0j}
    try:
        seg_left_in = log_tau_ratio(symbol, g, contour, x, x - step, N=N)
        seg_left_out = log_tau_ratio(symbol, g, contour, x - step,
                                     x - 2 * step, N=N)
        seg_right_in = log_tau_ratio(symbol, g, contour, x, x + step, N=N)
        seg_right_out = log_tau_ratio(symbol, g, contour, x + step,
                                      x + 2 * step, N=N)
    except FlowSingularityError as exc:
        raise FlowSingularityError(
            f"tau stencil at x={x} step={step} crosses a zero of tau: "
            f"{exc}", where=("stencil", x), rcond=exc.rcond) from exc
    logs[-1] = seg_left_in
    logs[-2] = seg_left_in + seg_left_out
    logs[1] = seg_right_in
    logs[2] = seg_right_in + seg_right_out
    d2 = (-logs[-2] + 16 * logs[-1] - 30 * logs[0] + 16 * logs[1] -
          logs[2]) / (12.0 * step * step)
    return float(-2.0 * d2.real)


# ---------------------------------------------------------------------------
# rational approximation of exp(h)
# ---------------------------------------------------------------------------


def rational_approx_exp(h_coeffs, k: int, contour: Contour):
    """RationalFactor r_k with r_k(z) = ((2k + h)/(2k - h))^k -> e^{h}.

    Zeros solve h(z) = -2k, poles solve h(z) = 2k, each with multiplicity
    k; all must lie in D-.  Returns (factor, sup_error) with the sup
    measured at the contour nodes against e^{h}.
    """
    if k < 1:
        raise SymbolError("approximation order k must be >= 1")
    h_coeffs = tuple(float(h) for h in np.atleast_1d(h_coeffs))
    generator = GroupElement(h_coeffs=h_coeffs)
    deg = generator.degree
    if deg == 0:
        raise SymbolError("h must be a nonzero odd polynomial")
    poly = np.zeros(deg + 1)
    for j, h in enumerate(h_coeffs):
        if h != 0.0:
            poly[deg - (2 * j + 1)] = h

    def roots_of(shift):
        p = poly.copy()
        p[-1] += shift
        return np.roots(p)

    zeros = roots_of(2.0 * k)
    poles = roots_of(-2.0 * k)
    for w in np.concatenate([zeros, poles]):
        if region_of(contour, w) != "minus":
            raise SymbolError(
                f"root {w} of h = +-2k lies in closure(D+): k={k} too "
                f"small for this contour")
    r = RationalFactor(zeros=tuple(zeros) * k, poles=tuple(poles) * k,
                       scale=(-1.0) ** k)
    lam = contour.nodes
    sup_err = float(np.max(np.abs(r.eval_at(lam) -
                                  np.exp(generator.h_at(lam)))))
    return r, sup_err
