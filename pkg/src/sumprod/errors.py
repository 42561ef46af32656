"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates an operation's precondition."""


class CostGuardError(RuntimeError):
    """Refusal: the requested computation exceeds the configured work budget.

    ``estimate`` is the work the call would have needed and ``budget`` the
    limit it was checked against (both in the operation's own units).
    """

    def __init__(self, message: str, estimate: float = 0.0, budget: float = 0.0):
        super().__init__(message)
        self.estimate = estimate
        self.budget = budget


class EmptyBlockError(ValueError):
    """A prime block is empty where a nonempty one is required."""
