"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when inputs violate a documented precondition."""


class DomainError(ValidationError):
    """Raised when a position lies outside a schedule's z-domain."""


class UndefinedMixingAngleError(ValidationError):
    """Raised when both couplings vanish and the mixing angle has no value."""


class NumericalFailureError(RuntimeError):
    """Raised when an integration produces non-finite values.

    The step index where the failure was first detected is available as
    ``step_index``.
    """

    def __init__(self, message: str, step_index: int):
        super().__init__(message)
        self.step_index = step_index
