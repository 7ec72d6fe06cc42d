"""Exception hierarchy; the CLI maps these onto exit codes."""


class ShiftconvError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class DomainError(ShiftconvError, ValueError):
    """Input outside the supported domain or a violated precondition."""


class PoleError(DomainError):
    """Evaluation at a pole of a Gamma factor."""


class UnsupportedModulusError(DomainError):
    pass


class ConfigError(DomainError):
    pass


class ConvergenceError(ShiftconvError, ArithmeticError):
    """Quadrature or contour integration failed to converge."""


class ResourceError(ShiftconvError):
    """A requested size exceeds a configured ceiling."""

    exit_code = 2


class CoverageError(ResourceError):
    """A coefficient table does not cover the support a computation needs."""
