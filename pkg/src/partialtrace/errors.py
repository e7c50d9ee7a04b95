"""Exception hierarchy shared by all modules."""


class PartialTraceError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(PartialTraceError, ValueError):
    """Malformed or out-of-range input."""


class NotClassAError(InvalidInputError):
    """Weight vector with a zero first or last entry where a_1 > 0, a_N > 0 is required."""


class DomainError(InvalidInputError):
    """Evaluation point outside the domain of a function."""


class NotApplicableError(InvalidInputError):
    """Operation requested for parameters it does not cover."""


class NumericalError(PartialTraceError, ArithmeticError):
    """A numerical procedure failed to produce a usable result."""


class DivergenceError(NumericalError):
    """Pseudo-time iteration whose residual blew up.

    Attributes
    ----------
    iterations : int
        Iteration at which divergence was detected.
    residual : float
        Residual max-norm at that iteration.
    best_residual : float
        Smallest residual seen before divergence.
    """

    def __init__(self, message, iterations, residual, best_residual):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual
        self.best_residual = best_residual


class InconclusiveError(NumericalError):
    """Sampling procedure that accepted no samples within its budget."""
