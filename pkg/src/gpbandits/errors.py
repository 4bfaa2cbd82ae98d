"""Exception types shared across the package."""


class InputError(ValueError):
    """Raised when an argument violates an operation's preconditions."""


class ConfigError(InputError):
    """Raised when a JSON config fails validation.

    ``fields`` lists every offending key so the caller can report them all
    at once instead of fixing one per run.
    """

    def __init__(self, fields, message=None):
        self.fields = list(fields)
        if message is None:
            message = "invalid config fields: " + ", ".join(self.fields)
        super().__init__(message)


class NumericalError(ArithmeticError):
    """Raised when a Cholesky pivot is non-positive even after jitter."""

    def __init__(self, pivot_index, pivot_value):
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value
        super().__init__(
            f"Cholesky breakdown at pivot {pivot_index}: value {pivot_value!r}"
        )
