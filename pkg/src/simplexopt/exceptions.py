"""Exception types shared across the package."""


class SimplexOptError(Exception):
    """Base class for all package errors."""


class DimensionError(SimplexOptError, ValueError):
    """Vector/matrix shapes do not line up (or a vector is empty)."""


class DomainError(SimplexOptError, ValueError):
    """A scalar argument is outside its valid range."""


class InfiniteDivergenceError(SimplexOptError, ValueError):
    """Relative entropy D(u|w) is +inf because u puts mass where w has none."""


class StepSizeError(SimplexOptError, ValueError):
    """A step size exceeds the largest feasible step for the scheme."""


class LineSearchError(SimplexOptError, RuntimeError):
    """Line search got a non-descent direction or exhausted its shrinks."""


class NumericalError(SimplexOptError, RuntimeError):
    """An objective or gradient evaluated to NaN/Inf during a solve.

    When raised by the iteration driver, the partial trace is attached as
    the ``trace`` attribute.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class DataValidationError(SimplexOptError, ValueError):
    """An input dataset violates its contract (e.g. nonpositive price relative)."""


class ConfigError(SimplexOptError, ValueError):
    """An experiment configuration is malformed or names unknown options."""
