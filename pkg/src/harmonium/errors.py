"""Exception types shared across the package."""


class HarmoniumError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(HarmoniumError):
    """An argument lies outside the mathematically admissible domain."""


class SingularModel(HarmoniumError):
    """Exponent parameters do not define a normalizable (trace-class) kernel."""


class ConvergenceError(HarmoniumError):
    """An iterative method failed to converge within its cap."""


class PrecisionError(HarmoniumError):
    """The requested precision cannot certify the result."""


class UnderflowError(HarmoniumError):
    """A quantity sits at or below the precision floor and must not be fitted."""


class NoValidRoot(HarmoniumError):
    """No root satisfying the selection rule exists."""
