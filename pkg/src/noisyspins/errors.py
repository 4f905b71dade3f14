"""Exception types shared across the package."""


class NoisySpinsError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(NoisySpinsError, ValueError):
    """Operator or state dimensions are inconsistent."""


class NumericalError(NoisySpinsError, RuntimeError):
    """A numerical computation produced non-finite or unphysical output."""


class ConvergenceError(NumericalError):
    """An iterative solver failed to reach its tolerance."""


class SingularityError(NumericalError):
    """A root collided with a pole or with another root."""
