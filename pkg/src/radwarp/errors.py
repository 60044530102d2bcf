"""Exception hierarchy shared across the package."""


class RadwarpError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(RadwarpError):
    """Jets or tensors combined with incompatible variable counts."""


class BasePointError(RadwarpError):
    """Jets expanded at different base points were combined."""


class OrderExhaustedError(RadwarpError):
    """A derivative was requested from a jet of order zero."""


class SingularCompositionError(RadwarpError):
    """Analytic composition evaluated at a singular point (e.g. 1/0, log 0)."""


class DomainError(RadwarpError):
    """Evaluation point outside the admissible domain."""


class ChartSingularityError(RadwarpError):
    """Polar chart degenerates (sin of an angular coordinate vanishes)."""


class SingularMetricError(RadwarpError):
    """A diagonal metric entry vanishes where it must be invertible."""


class ProximityError(RadwarpError):
    """Evaluation point too close to the coordinate origin for reliable tensor arithmetic."""


class EvaluationError(RadwarpError):
    """An integrand or profile produced NaN/Inf where a finite value is required."""


class InadmissibleParameterError(RadwarpError):
    """Parameter combination violates the hypotheses of the requested check."""


class ConfigError(RadwarpError):
    """Configuration file is malformed or requests an invalid run."""
