"""Characteristic functions, m-functions and Weyl-theoretic utilities.

The characteristic data of a symbol collects u = T^{-1}1 and v = T^{-1}z
together with the minus-projections phi = 𝒂u - 1 and psi = 𝒂v - z, the
leading tail coefficient kappa1 of phi, and the pairing determinant Delta.
The m-function (z + psi)/(1 + phi) + kappa1 ties the operator data to
spectral theory: it equals -m_plus(-z^2) on Re z > 0 and m_minus(-z^2) on
Re z < 0 for the Weyl functions of the associated Schrodinger operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.linalg import lu_solve

from .contour import Contour, contour_integral
from .errors import SymbolError
from .hardy import even_odd_split, project
from .toeplitz import (VectorSymbol, assemble_toeplitz, evaluate_group,
                       factor_toeplitz, solve_toeplitz)

# ---------------------------------------------------------------------------
# characteristic data
# ---------------------------------------------------------------------------


@dataclass
class CharacteristicData:
    """Solutions and minus-side data of one assembled operator."""

    contour: Contour
    symbol: VectorSymbol
    g: object
    N: int
    u: np.ndarray
    v: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    kappa1: complex
    residual: float
    rcond: float
    lu: tuple = field(repr=False, default=None)
    matrix: np.ndarray = field(repr=False, default=None)

    # -- pointwise evaluations on D- ------------------------------------

    def phi_at(self, z):
        return project(self.phi, self.contour, "minus", z)

    def psi_at(self, z):
        return project(self.psi, self.contour, "minus", z)

    def delta_at(self, z):
        """Pairing determinant Delta(z), even in z."""
        z = complex(z)
        pp, pm = self.phi_at(z), self.phi_at(-z)
        sp, sm = self.psi_at(z), self.psi_at(-z)
        return ((1.0 + pm) * (sp + z) - (1.0 + pp) * (sm - z)) / (2.0 * z)

    def m_at(self, z):
        z = np.asarray(z, dtype=complex)
        scalar = z.ndim == 0
        z = np.atleast_1d(z)
        pp = project(self.phi, self.contour, "minus", z)
        sp = project(self.psi, self.contour, "minus", z)
        denom = 1.0 + pp
        if np.any(np.abs(denom) < 1e-14):
            raise SymbolError("m-function evaluated at a zero of 1 + phi")
        out = (z + sp) / denom + self.kappa1
        return complex(out[0]) if scalar else out

    def moment(self, k: int) -> complex:
        """Tail coefficient s_k = (1/2pi i) * integral of lam^{k-1} g atilde u."""
        lam = self.contour.nodes
        return contour_integral(lam ** (k - 1) * self._decaying_density(),
                                self.contour)

    def _decaying_density(self):
        s = self.symbol.samples(self.contour)
        gv = evaluate_group(self.g, self.contour.nodes)
        ue, uo = even_odd_split(self.u, self.contour)
        return gv * (s["at1"] * ue + s["at2"] * uo)


def characteristic_functions(symbol: VectorSymbol, contour: Contour,
                             N: int = 2, g=None,
                             cond_max: float = 1e12) -> CharacteristicData:
    """Assemble T(g𝒂), solve for u and v, and form phi, psi, kappa1.

    kappa1 is computed by the contour integral of the decaying density
    g*atilde*u, never by tail fitting.
    """
    lam = contour.nodes
    matrix = assemble_toeplitz(symbol, g, contour, N)
    lu, rcond = factor_toeplitz(matrix, cond_max=cond_max)
    sol_u = solve_toeplitz(matrix, np.ones_like(lam), lu=lu, rcond=rcond)
    sol_v = solve_toeplitz(matrix, lam, lu=lu, rcond=rcond)
    u, v = sol_u.values, sol_v.values

    s = symbol.samples(contour)
    gv = evaluate_group(g, lam)
    ue, uo = even_odd_split(u, contour)
    ve, vo = even_odd_split(v, contour)
    phi = gv * (s["a1"] * ue + s["a2"] * uo) - 1.0
    psi = gv * (s["a1"] * ve + s["a2"] * vo) - lam
    kappa1 = contour_integral(gv * (s["at1"] * ue + s["at2"] * uo), contour)

    return CharacteristicData(contour=contour, symbol=symbol, g=g, N=N,
                              u=u, v=v, phi=phi, psi=psi, kappa1=kappa1,
                              residual=max(sol_u.residual, sol_v.residual),
                              rcond=rcond, lu=lu, matrix=matrix)


# ---------------------------------------------------------------------------
# m-functions
# ---------------------------------------------------------------------------

@dataclass
class MFunction:
    """Evaluable m-function with optional asymptotic data.

    ``asym`` lists the z^{-k} coefficients (k = 1, 2, ...) of the expansion
    m(z) = z + sum_k asym[k-1] z^{-k}; required by symbol_from_m.
    """

    eval: object
    mu0: float = 0.0
    asym: list = None
    real_flag: bool = True
    name: str = "m"

    def __call__(self, z):
        return self.eval(z)


def m_function(cd: CharacteristicData, mu0: float = 0.0,
               name: str = "m[constructed]") -> MFunction:
    """Wrap the characteristic data's m evaluation as an MFunction."""
    real_flag = bool(cd.symbol.real_flag) and _group_is_real(cd.g)
    return MFunction(eval=cd.m_at, mu0=mu0, asym=None,
                     real_flag=real_flag, name=name)


def _group_is_real(g) -> bool:
    if g is None or (np.isscalar(g) and g == 1):
        return True
    probe = getattr(g, "is_real", None)
    if callable(probe):
        return bool(probe())
    return False


def herglotz_defect(m, points) -> float:
    """Worst violation of Im m(z)/Im z > 0 over the sample points.

    Returns the most negative value of the quotient (0 when all samples
    satisfy the inequality strictly).
    """
    worst = 0.0
    for z in points:
        z = complex(z)
        if z.imag == 0:
            continue
        val = complex(m.eval(z))
        quot = val.imag / z.imag
        worst = min(worst, quot)
    return worst


# ---------------------------------------------------------------------------
# Darboux operation
# ---------------------------------------------------------------------------

def darboux_single(f, zeta: complex):
    """The map f -> (z^2 - zeta^2)/(f(z) - f(zeta)) - f(zeta).

    Guaranteed to produce an m-function only in the paired form below;
    exposed for experimentation.
    """
    zeta = complex(zeta)

    def g(z):
        z = np.asarray(z, dtype=complex)
        fz = np.asarray(f(z), dtype=complex)
        fzeta = complex(f(zeta))
        diff = fz - fzeta
        if np.any(np.abs(diff) < 1e-14):
            raise SymbolError("Darboux denominator vanished")
        return (z * z - zeta * zeta) / diff - fzeta

    return g


def darboux(m: MFunction, zeta: complex, eta: complex) -> MFunction:
    """Paired Darboux transform d_zeta d_eta m.

    Matches the m-function of the symbol multiplied by the pole/zero pair
    factor with pole zeta and zero parameter eta.
    """
    inner = darboux_single(m.eval, eta)
    outer = darboux_single(inner, zeta)
    real = m.real_flag and (
        (abs(complex(zeta).imag) < 1e-14 and abs(complex(eta).imag) < 1e-14)
        or abs(complex(zeta) - np.conj(complex(eta))) < 1e-14)
    return MFunction(eval=outer, mu0=m.mu0, asym=None, real_flag=real,
                     name=f"d[{zeta},{eta}]({m.name})")


# ---------------------------------------------------------------------------
# Weyl split, reflection, xi
# ---------------------------------------------------------------------------

def branch_sqrt_neg(z):
    """sqrt(-z) mapping the upper half-plane into {Re > 0, Im < 0}.

    For z on the positive real axis (a boundary point of the upper
    half-plane) the limit from above is taken, i.e. -i*sqrt(z).
    """
    z = np.asarray(z, dtype=complex)
    s = np.sqrt(-z)
    on_pos_axis = (z.imag == 0) & (z.real > 0)
    return np.where(on_pos_axis, np.conj(s), s)


@dataclass
class WeylData:
    """Weyl functions and reflection data at one spectral point."""

    m_plus: complex
    m_minus: complex
    m1: complex
    m2: complex
    R: complex
    xi1: float
    xi2: float


def weyl_pair(m: MFunction, z: complex):
    """(m_plus(z), m_minus(z)) for a spectral-plane point z in C_+."""
    s = complex(branch_sqrt_neg(z))
    m_plus = -complex(m.eval(s))
    m_minus = complex(m.eval(-s))
    return m_plus, m_minus


def weyl_and_reflection(m: MFunction, z: complex) -> WeylData:
    """Weyl functions, diagonal Green data m1/m2, reflection R and xi."""
    m_plus, m_minus = weyl_pair(m, z)
    denom = m_plus + m_minus
    if abs(denom) < 1e-14:
        raise SymbolError("m_plus + m_minus vanished (degenerate point)")
    m1 = -1.0 / denom
    m2 = m_plus * m_minus / denom
    refl = (np.conj(m_plus) + m_minus) / denom
    xi1 = float(np.angle(m1) / np.pi)
    xi2 = float(np.angle(m2) / np.pi)
    return WeylData(m_plus=m_plus, m_minus=m_minus, m1=complex(m1),
                    m2=complex(m2), R=complex(refl), xi1=xi1, xi2=xi2)


def xi_pair_from_weyl(m_plus: complex, m_minus: complex):
    """(xi1, xi2, |R|) for one pair of upper-half-plane Weyl values."""
    denom = m_plus + m_minus
    m1 = -1.0 / denom
    m2 = m_plus * m_minus / denom
    refl = abs((np.conj(m_plus) + m_minus) / denom)
    return (float(np.angle(m1) / np.pi), float(np.angle(m2) / np.pi), refl)


def herglotz_from_xi(xi1, xi2, lam0: float, lam1: float,
                     lam_max: float = 200.0):
    """Herglotz functions (m1, m2) from boundary xi data.

    Parameters
    ----------
    xi1, xi2 : callables on [lam0, infinity) taking values in [0, 1];
        must approach 1/2 integrably as lam -> +infinity.
    lam0 : lower integration limit (below the spectrum).
    lam1 : the zero parameter entering the m2 prefactor.
    lam_max : truncation point for the quadrature; beyond it the integrand
        xi_j - 1/2 is assumed negligible.

    Returns
    -------
    (m1, m2) : callables on the upper half-plane.
    """
    for xi in (xi1, xi2):
        probe = np.linspace(lam0, lam_max, 101)
        vals = np.array([xi(t) for t in probe], dtype=float)
        if np.any(vals < -1e-12) or np.any(vals > 1.0 + 1e-12):
            raise SymbolError("xi data leaves [0, 1]")

    def herglotz_exponent(xi, z):
        def integrand_re(t):
            base = xi(t) - (0.5 if t > 0 else 0.0)
            return (base / (t - z)).real

        def integrand_im(t):
            base = xi(t) - (0.5 if t > 0 else 0.0)
            return (base / (t - z)).imag

        pieces = [(lam0, 0.0), (0.0, lam_max)] if lam0 < 0 else \
            [(lam0, lam_max)]
        total = 0.0 + 0.0j
        for a, b in pieces:
            re, _ = quad(integrand_re, a, b, limit=200)
            im, _ = quad(integrand_im, a, b, limit=200)
            total += re + 1j * im
        return total

    def m1(z):
        z = complex(z)
        s = complex(branch_sqrt_neg(z))
        return 1.0 / (2.0 * s) * np.exp(herglotz_exponent(xi1, z))

    def m2(z):
        z = complex(z)
        s = complex(branch_sqrt_neg(z))
        return -0.5 * s * ((lam1 - z) / (-z)) * \
            np.exp(herglotz_exponent(xi2, z))

    return m1, m2
