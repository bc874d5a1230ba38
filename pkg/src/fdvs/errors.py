"""Exception types shared across the package."""


class FdvsError(Exception):
    """Base class for all package errors."""


class ConfigError(FdvsError):
    """Invalid run configuration; the message names the offending key path."""


class ChartExit(FdvsError):
    """The chart fields left the validity region max(n1^2 + n2^2) <= r_max^2."""


class AmplitudeTooLarge(ChartExit):
    """Initial data synthesis would already violate chart validity."""


class PrincipalDegenerate(FdvsError):
    """det A of the pointwise principal system fell to or below the floor."""


class NonFinite(FdvsError):
    """A public operation produced NaN or Inf values."""


class WrapAround(FdvsError):
    """Requested evolution time exceeds the periodic-box wrap guard."""


class SupportViolation(FdvsError):
    """A field violates the support condition required by the check."""


class EmptyWindow(FdvsError):
    """A fit window contains no usable samples."""
