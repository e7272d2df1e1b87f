"""Exception and warning types shared across the package."""


class DunklError(Exception):
    """Base class for all package errors."""


class RegimeError(DunklError):
    """Parameters outside the convergent regime (e.g. beta*k(alpha) <= 1)."""


class DimensionError(DunklError):
    """Invalid rank / particle count for the requested family."""


class WallError(DunklError):
    """A quantity was requested on a chamber wall (alpha . x = 0)."""


class StepError(DunklError):
    """Adaptive sub-stepping failed to keep the state inside the chamber."""


class SizeError(DunklError):
    """Group or tensor dimension above the configured cap."""


class SamplerUnavailable(DunklError):
    """No exact sampler backend for the requested configuration."""


class UnsupportedMultiplicity(DunklError):
    """Closed form only exists for unit multiplicities."""


class ExtrapolationError(DunklError):
    """Query outside a cached interpolation grid."""


class MismatchError(DunklError):
    """Inconsistent descriptors between objects that must share a system."""


class StiffnessError(DunklError):
    """ODE integrator hit its step floor."""


class ConvergenceError(DunklError):
    """Iterative solver did not converge."""


class InsufficientRangeError(DunklError):
    """Time series does not span enough decades for a power-law fit."""


class QuadratureError(DunklError):
    """Quadrature rule not applicable (dimension too high)."""


class SchemaError(DunklError):
    """Configuration or input file fails schema validation."""


class VarianceWarning(UserWarning):
    """Plain Monte Carlo standard errors unreliable (beta*k <= 3)."""
