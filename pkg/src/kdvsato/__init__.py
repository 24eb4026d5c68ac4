"""Tau-function construction of KdV flows on Hardy spaces.

The package builds a closed curve around the spectrum, represents a
potential through the ratio data of its Weyl function on that curve,
and drives the potential with a commuting family of flows by solving
Toeplitz systems.  The value of the flow at a point is read off from a
regularized determinant (the tau function) and its log-derivatives.

Modules
-------
contour
    Curve geometry, quadrature nodes, and region classification.
hardy
    Discrete Cauchy projections onto the interior and exterior spaces.
toeplitz
    Vector symbols, operator assembly, and gated dense solves.
spectral
    Characteristic functions, m-functions, Darboux maps, Weyl data.
tau
    Determinant tau functions, rational factors, cocycle checks.
flow
    Group elements, potentials along the flow, solution grids.
potentials
    Ready-made m-functions and the shooting route from a potential.
conformal
    The slit-domain maps behind the curve geometry and their inverses.
oracle
    Independent reference routes: a spectral KdV integrator, a
    Schrodinger residual check, and a dense transfer determinant.
cli
    Command line front end (``kdvsato``); not imported here.
"""

from __future__ import annotations

from .errors import (ConfigError, ContourError, FlowSingularityError,
                     KdvSatoError, OracleError, ProjectionError, SymbolError)
from ._backend import USING_COMPILED
from .contour import (Contour, build_contour, contour_integral, region_of,
                      scale_contour, tail_magnitude)
from .hardy import (boundary_projection_matrix, membership_defect,
                    minus_projection_matrix, project, quadrature_norm)
from .toeplitz import (SolveResult, VectorSymbol, assemble_toeplitz,
                       evaluate_group, factor_toeplitz, free_symbol,
                       invert_symbol, multiply_symbols, scale_symbol,
                       solve_toeplitz, symbol_from_m)
from .spectral import (CharacteristicData, MFunction, WeylData,
                       branch_sqrt_neg, characteristic_functions, darboux,
                       herglotz_defect, m_function, weyl_and_reflection,
                       weyl_pair, xi_pair_from_weyl)
from .tau import (CocycleReport, PositivityReport, RationalFactor,
                  cocycle_check, m_prime_via_tau, positivity_gate, tau_det2,
                  tau_det2_rational, tau_conj_pair_formula,
                  tau_general_formula, tau_plain, tau_pole_formula,
                  tau_rational, tau_two_pole_formula, trace_pole,
                  trace_two_pole, validate_factor_region)
from .flow import (FlowPoint, FlowResult, FlowWorkspace, GroupElement,
                   baker_akhiezer, kdv_potential, kdv_solution_grid,
                   log_tau_ratio, rational_approx_exp, recurrence_residual,
                   tau_representation_q)
from .potentials import (PotentialSpec, gaussian_bump,
                         mfunction_from_potential, sech2_sum, soliton_m,
                         tabulated, weyl_from_ode)
from .conformal import (a_constant, fit_inverse_constants, inverse_expansion,
                        p_polynomial, phi_k, phi_k_inverse, psi_k)
from .oracle import (PeriodizedField, dense_transfer_det,
                     kdv_reference_integrate, schrodinger_residual)

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "ContourError", "FlowSingularityError", "KdvSatoError",
    "OracleError", "ProjectionError", "SymbolError",
    "USING_COMPILED",
    "Contour", "build_contour", "contour_integral", "region_of",
    "scale_contour", "tail_magnitude",
    "boundary_projection_matrix", "membership_defect",
    "minus_projection_matrix", "project", "quadrature_norm",
    "SolveResult", "VectorSymbol", "assemble_toeplitz", "evaluate_group",
    "factor_toeplitz", "free_symbol", "invert_symbol", "multiply_symbols",
    "scale_symbol", "solve_toeplitz", "symbol_from_m",
    "CharacteristicData", "MFunction", "WeylData", "branch_sqrt_neg",
    "characteristic_functions", "darboux", "herglotz_defect", "m_function",
    "weyl_and_reflection", "weyl_pair", "xi_pair_from_weyl",
    "CocycleReport", "PositivityReport", "RationalFactor", "cocycle_check",
    "m_prime_via_tau", "positivity_gate", "tau_det2", "tau_det2_rational",
    "tau_conj_pair_formula", "tau_general_formula", "tau_plain",
    "tau_pole_formula", "tau_rational", "tau_two_pole_formula",
    "trace_pole", "trace_two_pole", "validate_factor_region",
    "FlowPoint", "FlowResult", "FlowWorkspace", "GroupElement",
    "baker_akhiezer", "kdv_potential", "kdv_solution_grid", "log_tau_ratio",
    "rational_approx_exp", "recurrence_residual", "tau_representation_q",
    "PotentialSpec", "gaussian_bump", "mfunction_from_potential",
    "sech2_sum", "soliton_m", "tabulated", "weyl_from_ode",
    "a_constant", "fit_inverse_constants", "inverse_expansion",
    "p_polynomial", "phi_k", "phi_k_inverse", "psi_k",
    "PeriodizedField", "dense_transfer_det", "kdv_reference_integrate",
    "schrodinger_residual",
    "__version__",
]
