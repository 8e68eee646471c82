"""Exception hierarchy shared across the package."""


class MonopermError(Exception):
    """Base class for all errors raised by monoperm."""


class InputDomainError(MonopermError, ValueError):
    """An input lies outside the domain of an operation (NaN, negative variance, ...)."""


class DimensionError(MonopermError, ValueError):
    """Shapes or sizes of the inputs are incompatible."""


class DegenerateInputError(MonopermError, ValueError):
    """The input carries no usable direction, e.g. a zero Gram matrix."""


class ConvergenceError(MonopermError, ArithmeticError):
    """An iterative solver hit its iteration cap.

    The last residual is kept on ``residual`` so callers can decide whether
    the iterate is still usable.
    """

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ConfigError(MonopermError, ValueError):
    """An experiment configuration failed validation."""
