"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """Bad shapes, out-of-range indices or otherwise malformed inputs."""


class DegenerateSecant(ArithmeticError):
    """A secant pair whose denominator vanishes for the requested BB formula."""


class NumericalFailure(RuntimeError):
    """A computation produced non-finite values or failed to converge."""

    def __init__(self, message, round_index=None):
        super().__init__(message)
        self.round_index = round_index


class InsufficientData(ValueError):
    """Too few usable points for a fit."""


class ConfigError(ValueError):
    """A run configuration failed validation; ``path`` names the offending field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
