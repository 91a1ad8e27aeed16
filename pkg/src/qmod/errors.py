"""Exception hierarchy shared by every module of the package."""


class QModError(Exception):
    """Base class for all errors raised by qmod."""


class DomainError(QModError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class PoleError(DomainError):
    """The argument sits on a pole of the function."""


class BranchCutError(DomainError):
    """The argument sits on a branch cut that the principal branch rejects."""


class GeometryError(DomainError):
    """An integration path cannot be built from the given detour data."""


class ModularRouteError(DomainError):
    """Direct evaluation would be too expensive; use the modular formula instead."""


class ConfigurationError(QModError, ValueError):
    """Malformed settings, grids or command-line configuration."""


class AccuracyError(QModError, ArithmeticError):
    """A numerical procedure could not reach its requested accuracy.

    The best available estimate and its error bound are kept on the
    exception so that callers may decide to use them anyway.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class DivergenceError(AccuracyError):
    """An integral or series to infinity does not decay."""
