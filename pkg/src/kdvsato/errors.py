"""Exception types shared across the package."""

from __future__ import annotations


class KdvSatoError(Exception):
    """Base class for all package-specific errors."""


class ContourError(KdvSatoError):
    """Invalid contour parameters or a broken node-symmetry map."""


class ProjectionError(KdvSatoError):
    """Off-curve evaluation too close to the contour, or a side/region
    mismatch in a Cauchy projection."""


class SymbolError(KdvSatoError):
    """Vector-symbol construction or algebra failure (missing asymptotic
    coefficients, decay violation, vanishing group denominator)."""


class FlowSingularityError(KdvSatoError):
    """The operator is numerically non-invertible: the tau-function has a
    zero at the requested group element.  Carries the location when known.

    Attributes
    ----------
    where : tuple or None
        Optional ``(t, x)`` or description of the group element at which
        the singularity was detected.
    rcond : float or None
        Reciprocal condition estimate that triggered the error.
    """

    def __init__(self, message: str, where=None, rcond=None):
        super().__init__(message)
        self.where = where
        self.rcond = rcond


class OracleError(KdvSatoError):
    """Reference-integrator failure: CFL violation, blow-up, a periodic
    field that touches the boundary, or a grid too small for the
    high-order stencils."""


class ConfigError(KdvSatoError):
    """Invalid run configuration (CLI layer)."""
