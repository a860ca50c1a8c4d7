"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Input array has the wrong shape, length or contains non-finite values."""


class ConfigError(ValueError):
    """Invalid solver or sampling configuration.

    ``keys`` lists the offending configuration keys when known.
    """

    def __init__(self, message, keys=()):
        super().__init__(message)
        self.keys = tuple(keys)


class NumericalError(RuntimeError):
    """A numerical kernel failed (SVD on non-finite data, lost unitarity, ...)."""


class InfeasibleIterateError(RuntimeError):
    """An iterate violates a constraint set, so the objective is +inf."""
