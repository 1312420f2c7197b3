"""Exception types shared across the package."""


class PVError(Exception):
    """Base class for all package-specific errors."""


class AlphaOutOfRange(PVError):
    """Radial-power exponent alpha <= -d makes the intensity non-sigma-finite."""


class NegativeThreshold(PVError):
    pass


class DimensionMismatch(PVError):
    pass


class SingularConfiguration(PVError):
    """A linear solve hit the relative pivot threshold (near-degenerate points)."""


class NotUnit(PVError):
    pass


class ZeroVertex(PVError):
    pass


class ConditionViolated(PVError):
    """Ball-pair configuration violates delta^2 >= r'^2 - r^2."""


class EmptyAnnulus(PVError):
    pass


class BadBox(PVError):
    pass


class RadiusCapExceeded(PVError):
    """Cell construction would need points beyond the configured radius cap."""


class DegenerateCell(PVError):
    """A singular or boundary geometry event occurred in the final cell pass."""


class BufferTooSmall(PVError):
    """Too many box-experiment replicates failed edge certification."""


class ThresholdOutOfRange(PVError):
    pass


class BadRho(PVError):
    pass


class ConfigError(PVError):
    pass


class NotTabular(PVError):
    pass
