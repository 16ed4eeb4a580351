"""Exception and warning types raised across the package."""


class ContextualityError(Exception):
    """Base class for all errors raised by this package."""


class SizeLimitExceeded(ContextualityError):
    """A dense enumeration would exceed the configured size guard."""


class InvalidScenario(ContextualityError, ValueError):
    pass


class InvalidModel(ContextualityError, ValueError):
    pass


class DomainMismatch(ContextualityError, ValueError):
    pass


class ScenarioMismatch(ContextualityError, ValueError):
    pass


class OutcomeMismatch(ScenarioMismatch):
    pass


class NotContextPreserving(ContextualityError, ValueError):
    pass


class NumericalBreakdown(ContextualityError, ArithmeticError):
    """The floating-point simplex lost feasibility or failed to converge."""


class StatusMismatch(ContextualityError):
    """Duality was checked on a pair of programs that are not both optimal."""


class PreconditionViolated(ContextualityError, ValueError):
    pass


class TrivialInequality(ContextualityError, ValueError):
    """The algebraic bound does not exceed the inequality's bound."""


class ResourceScenarioMismatch(ContextualityError, ValueError):
    pass


class WidthMismatch(ContextualityError, ValueError):
    pass


class InvalidStrategy(ContextualityError, ValueError):
    def __init__(self, message, worst=None):
        super().__init__(message)
        self.worst = worst


class DegenerateDecomposition(UserWarning):
    """One side of the decomposition has weight too small to normalise."""
