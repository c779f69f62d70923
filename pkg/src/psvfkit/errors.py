"""Exception types shared across the package."""


class PsvfkitError(Exception):
    """Base class for every error raised deliberately by this package."""


class DomainError(PsvfkitError, ValueError):
    """Input outside the domain a routine is specified for."""


class DegenerateTangencyError(PsvfkitError, ValueError):
    """Tangency with a vanishing second derivative; fold type undefined."""


class ConvergenceError(PsvfkitError, RuntimeError):
    """Iteration budget exhausted before reaching the requested tolerance."""


class DegenerateFitError(PsvfkitError, RuntimeError):
    """Least squares fit too poor to report as a dimension estimate."""


class MismatchError(PsvfkitError, AssertionError):
    """A cross-check between two independently computed quantities failed."""
