"""Vector symbols and the discretized Toeplitz-type operator.

A vector symbol 𝒂 = (a1, a2) acts on boundary data u through the parity
split, 𝒂u = a1*u_e + a2*u_o, and the operator is the plus-projection of that
product on H_N(D+).  Each component splits as a_k = f_k + atilde_k where
f_k is the constant limit at infinity (asym[0]) and the remainder decays
along the contour.  The constant part multiplies pointwise without
projection; only the decaying part goes through the Cauchy projection.
Because the discretized contour is closed, the moment integrals against
atilde extract inverse-power coefficients exactly up to quadrature error,
so no higher-order analytic matching is needed (expansions of the tail
around any finite base point diverge near the contour vertex, which rules
the seemingly sharper splits out).

The discrete operator acts on full node-sample vectors.  With respect to the
discrete splitting into H_N(D+) and H(D-) samples it is block triangular
(the minus-side block is invertible multiplication by the constants), so
solves with H_N right-hand sides land in the discrete H_N automatically and
determinant bookkeeping can normalize the extra block away (see the tau
layer).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import get_lapack_funcs, lu_factor, lu_solve

from ._backend import assemble_operator
from .contour import Contour
from .errors import FlowSingularityError, SymbolError
from .hardy import BoundaryFunction, boundary_projection_matrix

# ---------------------------------------------------------------------------
# small series helpers (coefficients c_k of sum_k c_k z^{-k}, k = 0..L-1)
# ---------------------------------------------------------------------------


def _series_trim(a, L):
    out = list(a[:L])
    out += [0.0] * (L - len(out))
    return out


def _series_mul(a, b, L):
    out = [0.0] * L
    for i, ai in enumerate(a[:L]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: L - i]):
            out[i + j] += ai * bj
    return out


def _series_flip(a):
    """Coefficients of c(z) -> c(-z)."""
    return [ck * (-1) ** k for k, ck in enumerate(a)]


def _series_even(a):
    return [ck if k % 2 == 0 else 0.0 for k, ck in enumerate(a)]


def _series_odd(a):
    return [ck if k % 2 == 1 else 0.0 for k, ck in enumerate(a)]


def _series_add(a, b):
    return [x + y for x, y in zip(a, b)]


def _series_sub(a, b):
    return [x - y for x, y in zip(a, b)]


def _series_inv(a, L):
    """Reciprocal series; requires a[0] != 0."""
    if a[0] == 0:
        raise SymbolError("series has vanishing leading term")
    out = [0.0] * L
    out[0] = 1.0 / a[0]
    for k in range(1, L):
        acc = 0.0
        for j in range(1, k + 1):
            if j < len(a):
                acc += a[j] * out[k - j]
        out[k] = -acc / a[0]
    return out


# ---------------------------------------------------------------------------
# vector symbols
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class VectorSymbol:
    """Two-component symbol with an explicit analytic/decaying split.

    Parameters
    ----------
    a1, a2 : callables accepting complex arrays.
    asym1, asym2 : inverse-power expansion coefficients of the components at
        infinity (index k holds the z^{-k} coefficient); length >= L.
    L : number of tracked expansion coefficients (moments up to s_{L-2}
        stay quadrature-exact).
    b : real base point in D- anchoring the H_N normalization.
    real_flag : conjugate symmetry a_k(conj z) = conj(a_k(z)).
    """

    a1: object
    a2: object
    asym1: list
    asym2: list
    L: int
    b: float
    real_flag: bool = True
    name: str = "symbol"
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.asym1 = _series_trim(self.asym1, self.L)
        self.asym2 = _series_trim(self.asym2, self.L)
        self.f1 = _make_analytic_part(self.asym1[0])
        self.f2 = _make_analytic_part(self.asym2[0])

    # -- node sampling ------------------------------------------------

    def samples(self, contour: Contour) -> dict:
        """Node samples of a_k, f_k and atilde_k = a_k - f_k, cached."""
        key = id(contour)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        lam = contour.nodes
        a1 = np.asarray(self.a1(lam), dtype=complex)
        a2 = np.asarray(self.a2(lam), dtype=complex)
        f1 = np.asarray(self.f1(lam), dtype=complex)
        f2 = np.asarray(self.f2(lam), dtype=complex)
        out = {"a1": a1, "a2": a2, "f1": f1, "f2": f2,
               "at1": a1 - f1, "at2": a2 - f2}
        self._cache[key] = out
        return out

    def decay_report(self, contour: Contour) -> dict:
        """Max of |lam| * |atilde_k| over the nodes (bounded when the
        declared constant limit asym[0] is honest)."""
        s = self.samples(contour)
        scale = np.abs(contour.nodes)
        return {"at1": float(np.max(scale * np.abs(s["at1"]))),
                "at2": float(np.max(scale * np.abs(s["at2"])))}

    def realness_defect(self, contour: Contour) -> float:
        """Max nodewise |a_k(conj lam) - conj a_k(lam)|."""
        s = self.samples(contour)
        ci = contour.conj_index
        d1 = np.max(np.abs(s["a1"][ci] - np.conj(s["a1"])))
        d2 = np.max(np.abs(s["a2"][ci] - np.conj(s["a2"])))
        return float(max(d1, d2))


def _make_analytic_part(c0):
    c0 = complex(c0)

    def f(z):
        z = np.asarray(z, dtype=complex)
        return np.full_like(z, c0)

    return f


def free_symbol(L: int = 6, b: float = 3.0) -> VectorSymbol:
    """The identity symbol 𝒂 = (1, 1); its operator is the identity."""
    one = lambda z: np.ones_like(np.asarray(z, dtype=complex))
    return VectorSymbol(a1=one, a2=one, asym1=[1.0], asym2=[1.0],
                        L=L, b=b, real_flag=True, name="free")


def symbol_from_m(m, L: int, b: float) -> VectorSymbol:
    """Symbol (1, m(z)/z) of an m-function satisfying the asymptotic
    normalization m(z) = z + sum_k m_k z^{-k} + O(z^{-L+1}).

    Parameters
    ----------
    m : MFunction
        Must carry asymptotic coefficients ``asym`` for k = 1..L-2.
    L : decay order of the resulting symbol.
    b : base point (use the contour's).
    """
    mk = list(getattr(m, "asym", []) or [])
    if len(mk) < L - 2:
        raise SymbolError(
            f"need {L - 2} asymptotic coefficients for L={L}, "
            f"got {len(mk)}")
    one = lambda z: np.ones_like(np.asarray(z, dtype=complex))

    def a2(z):
        z = np.asarray(z, dtype=complex)
        return m.eval(z) / z

    asym2 = [1.0, 0.0] + [complex(v) for v in mk[: L - 2]]
    real_flag = bool(getattr(m, "real_flag", True))
    if real_flag:
        asym2 = [v.real if abs(v.imag) < 1e-13 else v for v in asym2]
    return VectorSymbol(a1=one, a2=a2, asym1=[1.0], asym2=asym2,
                        L=L, b=b, real_flag=real_flag, name="from-m")


# ---------------------------------------------------------------------------
# symbol algebra of the multiplicative group
# ---------------------------------------------------------------------------

def _call_even_odd(func):
    fe = lambda z: 0.5 * (func(z) + func(-np.asarray(z, dtype=complex)))
    fo = lambda z: 0.5 * (func(z) - func(-np.asarray(z, dtype=complex)))
    return fe, fo


def multiply_symbols(m: VectorSymbol, n: VectorSymbol) -> VectorSymbol:
    """Group product: (m.n)_1 = m1*n1_e + m2*n1_o, (m.n)_2 = m1*n2_o + m2*n2_e."""
    L = min(m.L, n.L)
    n1e, n1o = _call_even_odd(n.a1)
    n2e, n2o = _call_even_odd(n.a2)
    p1 = lambda z: m.a1(z) * n1e(z) + m.a2(z) * n1o(z)
    p2 = lambda z: m.a1(z) * n2o(z) + m.a2(z) * n2e(z)
    s1 = _series_add(_series_mul(m.asym1, _series_even(n.asym1), L),
                     _series_mul(m.asym2, _series_odd(n.asym1), L))
    s2 = _series_add(_series_mul(m.asym1, _series_odd(n.asym2), L),
                     _series_mul(m.asym2, _series_even(n.asym2), L))
    return VectorSymbol(a1=p1, a2=p2, asym1=s1, asym2=s2, L=L, b=m.b,
                        real_flag=m.real_flag and n.real_flag,
                        name=f"({m.name})*({n.name})")


def invert_symbol(m: VectorSymbol, tol: float = 1e-12) -> VectorSymbol:
    """Group inverse via the closed formulas; requires the group denominator
    d(z) = m1(z)m2(-z) + m1(-z)m2(z) to stay away from zero."""
    a1, a2 = m.a1, m.a2

    def denom(z):
        z = np.asarray(z, dtype=complex)
        return a1(z) * a2(-z) + a1(-z) * a2(z)

    def check(dv):
        if np.min(np.abs(dv)) < tol:
            raise SymbolError("group denominator vanishes on evaluation set")

    def h1(z):
        z = np.asarray(z, dtype=complex)
        dv = denom(z)
        check(dv)
        return (a1(-z) + a2(-z) + a2(z) - a1(z)) / dv

    def h2(z):
        z = np.asarray(z, dtype=complex)
        dv = denom(z)
        check(dv)
        return (a1(-z) + a2(-z) + a1(z) - a2(z)) / dv

    L = m.L
    d_ser = _series_add(_series_mul(m.asym1, _series_flip(m.asym2), L),
                        _series_mul(_series_flip(m.asym1), m.asym2, L))
    dinv = _series_inv(d_ser, L)
    f1 = _series_flip(m.asym1)
    f2 = _series_flip(m.asym2)
    s1 = _series_mul(_series_sub(_series_add(f1, f2),
                                 _series_sub(m.asym1, m.asym2)), dinv, L)
    s2 = _series_mul(_series_add(_series_add(f1, f2),
                                 _series_sub(m.asym1, m.asym2)), dinv, L)
    return VectorSymbol(a1=h1, a2=h2, asym1=s1, asym2=s2, L=L, b=m.b,
                        real_flag=m.real_flag, name=f"inv({m.name})")


def scale_symbol(m: VectorSymbol, r) -> VectorSymbol:
    """Base-symbol shift r*𝒂 for a winding-free rational factor r.

    Used for cross-checks only; production paths keep the multiplicative
    factor in the assembly's g slot instead of re-splitting.
    """
    ser = r.series_at_infinity(m.L)
    p1 = lambda z: r.eval_at(z) * m.a1(z)
    p2 = lambda z: r.eval_at(z) * m.a2(z)
    return VectorSymbol(a1=p1, a2=p2,
                        asym1=_series_mul(ser, m.asym1, m.L),
                        asym2=_series_mul(ser, m.asym2, m.L),
                        L=m.L, b=m.b,
                        real_flag=m.real_flag and r.is_real(),
                        name=f"r*({m.name})")


# ---------------------------------------------------------------------------
# assembly and solves
# ---------------------------------------------------------------------------

def evaluate_group(g, z):
    """Evaluate a multiplicative group element at points z.

    Accepts None or 1 (identity), an array of precomputed node values, any
    object with ``eval_at`` (rational factors and flow group elements), or
    a plain callable.
    """
    z = np.asarray(z, dtype=complex)
    if g is None or (np.isscalar(g) and g == 1):
        return np.ones_like(z)
    if isinstance(g, np.ndarray):
        if g.shape != z.shape:
            raise SymbolError("precomputed group values have wrong shape")
        return g.astype(complex, copy=False)
    if hasattr(g, "eval_at"):
        return np.asarray(g.eval_at(z), dtype=complex)
    return np.asarray(g(z), dtype=complex)


def assemble_toeplitz(symbol: VectorSymbol, g, contour: Contour,
                      N: int = 2) -> np.ndarray:
    """Dense matrix of u -> p_plus(g 𝒂 u) + g f u_parity on node samples.

    ``g`` multiplies both components; pass None for the bare operator.
    """
    if symbol.L < N:
        raise SymbolError(f"decay order L={symbol.L} below growth index "
                          f"N={N}")
    s = symbol.samples(contour)
    gv = evaluate_group(g, contour.nodes)
    if not np.all(np.isfinite(gv)):
        raise SymbolError("group element evaluates non-finite on the nodes")
    k = boundary_projection_matrix(contour)
    return assemble_operator(k, contour.neg_index, gv * s["at1"],
                             gv * s["at2"], gv * s["f1"], gv * s["f2"])


@dataclass
class SolveResult:
    """Solution samples plus the diagnostics the contract asks for."""

    values: np.ndarray
    residual: float
    rcond: float
    lu: tuple

    def boundary_function(self, contour: Contour, N: int) -> BoundaryFunction:
        return BoundaryFunction(contour, self.values, "H_plus", N)


def factor_toeplitz(matrix: np.ndarray, cond_max: float = 1e12,
                    where=None):
    """LU-factor with a reciprocal-condition gate.

    Raises FlowSingularityError when the estimate indicates the operator is
    numerically non-invertible (the tau-function vanishes there).
    """
    anorm = np.linalg.norm(matrix, 1)
    lu, piv = lu_factor(matrix)
    gecon = get_lapack_funcs("gecon", (matrix,))
    rcond, info = gecon(lu, anorm, norm="1")
    if info != 0 or not np.isfinite(rcond) or rcond < 1.0 / cond_max:
        raise FlowSingularityError(
            f"operator numerically singular (rcond={rcond:.3e})",
            where=where, rcond=float(rcond))
    return (lu, piv), float(rcond)


def solve_toeplitz(matrix: np.ndarray, rhs, cond_max: float = 1e12,
                   where=None, lu=None, rcond=None) -> SolveResult:
    """Dense solve with residual and condition diagnostics.

    A prefactored ``lu`` (with its ``rcond``) can be supplied to reuse the
    factorization across right-hand sides.
    """
    rhs = np.asarray(rhs, dtype=complex)
    if lu is None:
        lu, rcond = factor_toeplitz(matrix, cond_max=cond_max, where=where)
    u = lu_solve(lu, rhs)
    num = np.linalg.norm(matrix @ u - rhs)
    den = np.linalg.norm(rhs)
    residual = float(num / den) if den > 0 else float(num)
    return SolveResult(values=u, residual=residual, rcond=float(rcond),
                       lu=lu)
