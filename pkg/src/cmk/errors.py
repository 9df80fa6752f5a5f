"""Exception hierarchy shared by the solver modules and the CLI."""


class CmkError(Exception):
    """Base class for all errors raised by this package."""


class InputError(CmkError, ValueError):
    """Malformed instance, parameter out of range, or unknown item id."""


class PreconditionError(InputError):
    """An operation's documented precondition does not hold for the input."""


class CapacityError(CmkError):
    """Input is larger than an exact method is configured to handle."""


class BudgetError(CmkError):
    """An enumeration would exceed its iteration budget."""

    def __init__(self, message, estimate=None, budget=None):
        super().__init__(message)
        self.estimate = estimate
        self.budget = budget


class ConvergenceError(CmkError):
    """Iteration cap hit; ``best`` holds the best solution found so far."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class OracleTimeout(CmkError):
    """Exact search ran out of time; carries the incumbent and an upper bound."""

    def __init__(self, message, best=None, best_value=None, upper_bound=None):
        super().__init__(message)
        self.best = best
        self.best_value = best_value
        self.upper_bound = upper_bound


class InternalError(CmkError, AssertionError):
    """A result failed a self-check. Always a bug."""
