"""Exception hierarchy shared across the package."""


class ValidationError(ValueError):
    """Raised when an input (scenario file, device field, CLI argument)
    violates a documented constraint. The message names the offending field."""


class SolverError(RuntimeError):
    """Base class for solver failures."""


class BracketingError(SolverError):
    """The dual search could not bracket feasible multipliers.

    Carries the last observed constraint residuals in ``residuals``.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or {}


class ConvergenceError(SolverError):
    """An inner iteration failed to converge within its iteration budget."""
