"""Conformal-map utilities: the maps psi_k/phi_k, their exact polynomial
data, large-argument inversion, and power-series inversion in 1/s.

The polynomial p_k entering psi_k(z) = (sqrt(z) p_k(z) - p_k(1))/(z-1)^k
is built once per k in exact rational arithmetic (Fraction), so the
closed-form evaluation has no construction-time cancellation; floating
point enters only at evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .errors import ConfigError, SymbolError

# ---------------------------------------------------------------------------
# exact constants and polynomials
# ---------------------------------------------------------------------------


def a_constant(k: int) -> Fraction:
    """a_k = (k-1)! 2^k / (2k+1)!! as an exact rational."""
    if k < 1:
        raise ConfigError("k must be >= 1")
    num = Fraction(1)
    for j in range(1, k):
        num *= j
    num *= Fraction(2) ** k
    den = Fraction(1)
    for j in range(1, 2 * k + 2, 2):
        den *= j
    return num / den


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def _poly_add(a, b):
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, ai in enumerate(a):
        out[i] += ai
    for i, bi in enumerate(b):
        out[i] += bi
    return out


def _poly_scale(a, s):
    return [ai * s for ai in a]


def _poly_eval(a, z):
    out = 0.0 * z if not isinstance(z, complex) else 0.0 + 0.0j
    for c in reversed(a):
        out = out * z + float(c)
    return out


def _zm1_power(k: int):
    """(z-1)^k as ascending Fraction coefficients."""
    return [Fraction(comb(k, j)) * (-1) ** (k - j) for j in range(k + 1)]


def p_polynomial(k: int):
    """Ascending Fraction coefficients of p_k with
    psi_k(z) = (sqrt(z) p_k(z) - p_k(1))/(z-1)^k.

    Built from the recursion for the tail-integral part
    I_k = (sqrt(z) P_k + c_k)/(z-1)^k:
    P_1 = (2/3) z, c_1 = -2/3,
    P_{k+1} = (2 z (z-1)^k - 2k P_k)/(2k+3), c_{k+1} = -2k c_k/(2k+3),
    and p_k = ((2k-1)/(2k+1)) (z-1)^k + P_k.
    """
    if k < 1:
        raise ConfigError("k must be >= 1")
    P = [Fraction(0), Fraction(2, 3)]
    c = Fraction(-2, 3)
    for j in range(1, k):
        zf = _poly_mul([Fraction(0), Fraction(2)], _zm1_power(j))
        P = _poly_scale(_poly_add(zf, _poly_scale(P, Fraction(-2 * j))),
                        Fraction(1, 2 * j + 3))
        c = c * Fraction(-2 * j, 2 * j + 3)
    p = _poly_add(_poly_scale(_zm1_power(k), Fraction(2 * k - 1, 2 * k + 1)),
                  P)
    p1 = sum(p, Fraction(0))
    if p1 != (-1) ** (k - 1) * a_constant(k):
        raise SymbolError(f"polynomial self-check failed for k={k}")
    if c != -p1:
        raise SymbolError(f"constant self-check failed for k={k}")
    return p


def _poly_deriv(a):
    return [Fraction(j) * a[j] for j in range(1, len(a))]


_SQRT_TAYLOR_ORDER = 30


def _sqrt1p_taylor():
    """Fraction coefficients of sqrt(1+w) up to w^order."""
    coefs = [Fraction(1)]
    c = Fraction(1)
    for j in range(1, _SQRT_TAYLOR_ORDER + 1):
        c = c * (Fraction(1, 2) - (j - 1)) / j
        coefs.append(c)
    return coefs


_SQRT1P = _sqrt1p_taylor()


def _shifted(poly):
    """Coefficients of p(1+w) from ascending coefficients of p(z)."""
    out = [Fraction(0)] * len(poly)
    for j, cj in enumerate(poly):
        for i in range(j + 1):
            out[i] += cj * comb(j, i)
    return out


# ---------------------------------------------------------------------------
# the maps psi_k and phi_k
# ---------------------------------------------------------------------------

_CACHE: dict = {}


def _k_data(k: int):
    if k not in _CACHE:
        p = p_polynomial(k)
        series = _poly_mul(_SQRT1P, _shifted(p))
        # (sqrt(z) p(z) - p(1))/(z-1)^k near z = 1: drop w^0..w^{k-1}
        near = series[k:k + _SQRT_TAYLOR_ORDER - k]
        _CACHE[k] = (p, _poly_deriv(p), near, float(sum(p, Fraction(0))))
    return _CACHE[k]


def psi_k(z, k: int):
    """psi_k(z) = (sqrt(z) p_k(z) - p_k(1))/(z-1)^k, principal branch."""
    p, _, near, p1 = _k_data(k)
    z = np.asarray(z, dtype=complex)
    w = z - 1.0
    out = np.empty_like(z)
    close = np.abs(w) < 0.1
    if np.any(~close):
        zz = z[~close]
        out[~close] = (np.sqrt(zz) * _poly_eval(p, zz) - p1) / (
            (zz - 1.0) ** k)
    if np.any(close):
        ww = w[close]
        acc = np.zeros_like(ww)
        for c in reversed(near):
            acc = acc * ww + float(c)
        out[close] = acc
    return out if out.ndim else complex(out)


def psi_k_deriv(z, k: int):
    """d/dz psi_k via the closed form (step off |z-1| < 0.1 numerically)."""
    p, dp, near, p1 = _k_data(k)
    z = np.asarray(z, dtype=complex)
    w = z - 1.0
    out = np.empty_like(z)
    close = np.abs(w) < 0.1
    if np.any(~close):
        zz = z[~close]
        sq = np.sqrt(zz)
        val = (sq * _poly_eval(p, zz) - p1) / ((zz - 1.0) ** k)
        out[~close] = (_poly_eval(p, zz) / (2.0 * sq) +
                       sq * _poly_eval(dp, zz)) / (zz - 1.0) ** k - \
            k * val / (zz - 1.0)
    if np.any(close):
        ww = w[close]
        acc = np.zeros_like(ww)
        for j in range(len(near) - 1, 0, -1):
            acc = acc * ww + j * float(near[j])
        out[close] = acc
    return out if out.ndim else complex(out)


def phi_k(z, k: int):
    """phi_k = psi_k^2, the conformal map of the appendix construction."""
    v = psi_k(z, k)
    return v * v


def phi_k_deriv(z, k: int):
    return 2.0 * psi_k(z, k) * psi_k_deriv(z, k)


def phi_k_inverse(w, k: int, tol: float = 1e-13, max_iter: int = 50):
    """Newton inversion of phi_k seeded with the large-|w| expansion.

    After the tolerance is met two more polished steps run, so the
    returned point is accurate to the conditioning floor (needed when
    tail constants are regressed out of the inverse).
    """
    w = complex(w)
    z = w - 1.0 / (k * k - 0.25)
    polish = 2
    for _ in range(max_iter):
        f = complex(phi_k(z, k)) - w
        d = complex(phi_k_deriv(z, k))
        if d == 0:
            break
        if abs(f) < tol * max(1.0, abs(w)):
            if polish == 0:
                return z
            polish -= 1
        z = z - f / d
    raise SymbolError(f"phi_k inverse did not converge at w={w}, k={k}")


# ---------------------------------------------------------------------------
# series inversion in 1/s
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesInZInverse:
    """Truncated series F(s) = sum_{j=1}^{order} a_j s^{-j}.

    Coefficients are stored exactly when given as Fraction/int; the
    evaluation helper works in floating point.
    """

    coefficients: tuple
    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ConfigError("series order must be >= 1")
        if len(self.coefficients) != self.order:
            raise ConfigError("coefficient count must equal order")

    def eval_at(self, s):
        s = np.asarray(s, dtype=complex)
        out = np.zeros_like(s)
        for j in range(self.order, 0, -1):
            out = (out + float(self.coefficients[j - 1])) / s
        return out if out.ndim else complex(out)


def _series_mul(a, b, order):
    out = [Fraction(0)] * (order + 1)
    for i, ai in enumerate(a):
        if ai == 0 or i > order:
            continue
        for j, bj in enumerate(b):
            if i + j > order:
                break
            out[i + j] += ai * bj
    return out


def _series_pow_inv(w, j, order):
    """(1 + W(u))^{-j} truncated at u^order, W given by ascending coeffs
    with W[0] = 0."""
    one = [Fraction(1)] + [Fraction(0)] * order
    recip = one
    base = [Fraction(0)] * (order + 1)
    for i, wi in enumerate(w):
        if i <= order:
            base[i] = wi
    base[0] += Fraction(1)
    # series reciprocal by Newton-free long division
    recip = [Fraction(1)] + [Fraction(0)] * order
    for i in range(1, order + 1):
        acc = Fraction(0)
        for m in range(1, i + 1):
            acc += base[m] * recip[i - m]
        recip[i] = -acc
    out = one
    for _ in range(j):
        out = _series_mul(out, recip, order)
    return out


def invert_series(F: SeriesInZInverse, order: int) -> SeriesInZInverse:
    """Coefficients x_j of G with s = t + G(t) solving t = s + F(s).

    Fixed-point iteration G <- -F(t + G(t)) in exact rational
    arithmetic; iteration r fixes all x_j with j <= r.
    """
    if order < 1:
        raise ConfigError("order must be >= 1")
    if order > F.order:
        raise ConfigError("order exceeds the series truncation")
    a = [Fraction(c) for c in F.coefficients]
    x = [Fraction(0)] * order
    for _ in range(order):
        w = [Fraction(0)] * (order + 1)
        for i, xi in enumerate(x, start=1):
            if i + 1 <= order:
                w[i + 1] = xi
        new = [Fraction(0)] * (order + 1)
        for j in range(1, order + 1):
            pw = _series_pow_inv(w, j, order - j)
            for i, ci in enumerate(pw):
                if j + i <= order:
                    new[j + i] += a[j - 1] * ci
        x = [-new[i] for i in range(1, order + 1)]
    return SeriesInZInverse(coefficients=tuple(x), order=order)


# ---------------------------------------------------------------------------
# exact inverse expansion
# ---------------------------------------------------------------------------


def _u_mul(a, b, order):
    out = [Fraction(0)] * (order + 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        top = order - i
        for j, bj in enumerate(b[:top + 1]):
            if bj != 0:
                out[i + j] += ai * bj
    return out


def _u_recip(a, order):
    """1/(1 + W) for W = a with a[0] = 0, truncated at u^order."""
    out = [Fraction(0)] * (order + 1)
    out[0] = Fraction(1)
    for i in range(1, order + 1):
        acc = Fraction(0)
        for m in range(1, i + 1):
            acc += a[m] * out[i - m]
        out[i] = -acc
    return out


def _u_sqrt(a, order):
    """sqrt(1 + W) for W = a with a[0] = 0, truncated at u^order."""
    out = [Fraction(0)] * (order + 1)
    out[0] = Fraction(1)
    for i in range(1, order + 1):
        acc = a[i] / 2
        for m in range(1, i):
            acc -= out[m] * out[i - m] / 2
        out[i] = acc
    return out


def inverse_expansion(k: int, order: int = 8) -> dict:
    """Exact large-w expansion of the inverse of phi_k.

    Returns Fraction coefficient lists ``gamma`` and ``delta`` with

        phi_k^{-1}(w) = w + sum_i gamma[i] w^{-i}
                          + w^{1/2-k} sum_j delta[j] w^{-j},

    computed by exact fixed-point inversion of the two-parity series of
    phi_k at infinity (all arithmetic in Fraction).  In particular
    gamma[0] is g1(infinity) and delta[0] is g2(infinity).
    """
    if k < 1 or order < 1:
        raise ConfigError("k and order must be >= 1")
    p = p_polynomial(k)
    p1 = sum(p, Fraction(0))
    M = 2 * (order + k) + 2

    # phi_k(z) - z = A(1/z) + z^{1/2-k} B(1/z) with exact series A, B:
    # psi = z^{1/2} S1(1/z) - p1 z^{-k} S2(1/z), S2 = (1-1/z)^{-k},
    # S1 = (sum_j p_j z^{j-k}) * S2.
    half_order = M
    S2 = [Fraction(0)] * (half_order + 1)
    for i in range(half_order + 1):
        S2[i] = Fraction(comb(k + i - 1, i)) if i > 0 else Fraction(1)
    ptail = [Fraction(0)] * (half_order + 1)
    for j, cj in enumerate(p):
        if k - j <= half_order:
            ptail[k - j] += cj
    S1 = _u_mul(ptail, S2, half_order)
    # phi - z = z(S1^2 - 1) + p1^2 z^{-2k} S2^2 - 2 p1 z^{1/2-k} S1 S2
    S1sq = _u_mul(S1, S1, half_order)
    S2sq = _u_mul(S2, S2, half_order)
    A = [Fraction(0)] * (half_order + 1)
    for i in range(1, half_order + 1):
        A[i - 1] += S1sq[i]                       # z * (S1^2 - 1)
    for i in range(half_order + 1 - 2 * k):
        A[i + 2 * k] += p1 * p1 * S2sq[i]
    B = _u_mul(S1, S2, half_order)
    B = [-2 * p1 * b for b in B]

    # fixed point z = w - A(1/z) - z^{1/2-k} B(1/z) in u = w^{-1/2}:
    # z(u) = u^{-2} (1 + sum_{m>=2} e_m u^m), with E = that tail series.
    E = [Fraction(0)] * (M + 1)
    for _ in range(M + 2):
        onepE = list(E)
        onepE[0] += Fraction(1)
        rec = _u_recip(E, M)                      # (1+E)^{-1}
        sq = _u_sqrt(E, M)                        # (1+E)^{1/2}
        # 1/z = u^2 (1+E)^{-1}; z^{1/2} = u^{-1} (1+E)^{1/2}
        # A[m] multiplies z^{-m} = u^{2m} (1+E)^{-m}
        acc = [Fraction(0)] * (M + 1)
        invz_pow = [Fraction(0)] * (M + 1)
        invz_pow[0] = Fraction(1)
        for m in range(M // 2 + 1):
            if m <= half_order and A[m] != 0:
                shift = 2 * m
                for i, v in enumerate(invz_pow[:M + 1 - shift]):
                    acc[i + shift] += A[m] * v
            invz_pow = _u_mul(invz_pow, rec, M)
        # B[m] multiplies z^{1/2-k-m} = u^{2(k+m)-1} (1+E)^{1/2-k-m}
        half_acc = [Fraction(0)] * (M + 1)
        base = sq
        for _r in range(k):
            base = _u_mul(base, rec, M)           # (1+E)^{1/2-k}
        term = base
        for m in range(M // 2 + 1):
            shift = 2 * (k + m) - 1
            if shift > M:
                break
            if m <= half_order and B[m] != 0:
                for i, v in enumerate(term[:M + 1 - shift]):
                    half_acc[i + shift] += B[m] * v
            term = _u_mul(term, rec, M)
        newE = [Fraction(0)] * (M + 1)
        for i in range(M + 1):
            corr = acc[i] + half_acc[i]
            if corr != 0 and i + 2 <= M:
                newE[i + 2] = -corr
        # e_m carries u^{m}: z = u^{-2}(1 + sum e_m u^m) means the
        # correction -corr*u^i on z contributes e_{i+2}
        if newE == E:
            break
        E = newE

    gamma = [E[2 * i + 2] for i in range(order + 1)]
    delta = [E[2 * (j + k) + 1] for j in range(order + 1)]
    return {"gamma": gamma, "delta": delta,
            "g1_exact": gamma[0], "g2_exact": delta[0]}


# ---------------------------------------------------------------------------
# fitted inversion constants
# ---------------------------------------------------------------------------


def fit_inverse_constants(k: int, w_lo: float = None, w_hi: float = None,
                          count: int = 80, expansion_order: int = 12) -> dict:
    """Recover g1(infinity) and g2(infinity) of phi_k^{-1} numerically.

    phi_k^{-1}(w) - w = g1(w) + w^{-k+1/2} g2(w) with both factors
    analytic at infinity.  Each constant is fitted by regression on
    numerically inverted samples after subtracting the complementary
    exact tail from ``inverse_expansion``: the half-integer part is
    removed before fitting the integer columns for g1, and the integer
    part is removed (and the remainder rescaled by w^{k-1/2}) before
    fitting the half-integer columns for g2.  Neither target constant
    enters its own regression.

    The default window shrinks with k because the rescaled noise floor
    of the inverse grows like eps * |w|^{k+1/2}; samples use eight
    complex phases to separate the two parities.  Returns a dict with
    g1, g2, their exact reference values, and the sup residual of the
    fitted model over the sample set.
    """
    if w_lo is None:
        w_lo = {1: 2e2, 2: 6e1}.get(k, 3e1)
    if w_hi is None:
        w_hi = {1: 5e3, 2: 6e2}.get(k, 2e2)
    ex = inverse_expansion(k, order=expansion_order)
    gamma = [float(c) for c in ex["gamma"]]
    delta = [float(c) for c in ex["delta"]]
    radii = np.geomspace(w_lo, w_hi, max(4, count // 8))
    angles = np.array([0.4, 1.3, 2.2, 3.0])
    angles = np.concatenate([angles, -angles])
    w = (radii[:, None] * np.exp(1j * angles[None, :])).ravel()
    z = np.array([phi_k_inverse(x, k) for x in w])
    integer_tail = w + sum(c * w ** (-i) for i, c in enumerate(gamma))
    half_tail = w ** (0.5 - k) * sum(c * w ** (-j)
                                     for j, c in enumerate(delta))

    def _real_lstsq(cols, vals):
        A = np.concatenate([cols.real, cols.imag])
        b = np.concatenate([vals.real, vals.imag])
        coef, *_ = np.linalg.lstsq(A, b, rcond=None)
        resid = float(np.max(np.abs(cols @ coef - vals)))
        return coef, resid

    n_cols = 6
    cols = np.stack([w ** (-j) for j in range(n_cols)], axis=1)
    coef1, resid1 = _real_lstsq(cols, z - w - half_tail)
    coef2, resid2 = _real_lstsq(cols, (z - integer_tail) * w ** (k - 0.5))
    ak = a_constant(k)
    return {
        "g1": float(coef1[0]),
        "g2": float(coef2[0]),
        "g1_exact": -1.0 / (k * k - 0.25),
        "g2_exact": float(-2 * (-1) ** k * ak),
        "a_k": float(ak),
        "residual": max(resid1, resid2),
    }
