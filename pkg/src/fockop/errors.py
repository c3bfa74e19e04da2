"""Exception types shared across the package."""


class FockopError(Exception):
    """Base class for all package errors."""


class ParameterError(FockopError, ValueError):
    """An argument lies outside its documented range."""


class WeightError(FockopError, ValueError):
    """A weight produced non-finite values or falls outside the admissible class."""


class RadiusUnboundedError(WeightError):
    """The radius function cannot be bracketed (Laplacian vanishes on every probed disk)."""


class NotHermitianError(FockopError, ValueError):
    """A matrix that must be Hermitian deviates beyond tolerance."""

    def __init__(self, message, deviation):
        super().__init__(message)
        self.deviation = deviation


class NumericalCheckError(FockopError, RuntimeError):
    """A numerical self-check failed (e.g. quadrature too coarse)."""

    def __init__(self, check, message):
        super().__init__(f"{check}: {message}")
        self.check = check


class ConfigError(FockopError, ValueError):
    """Invalid run configuration."""


class ExtrapolationWarning(UserWarning):
    """Evaluation outside the region where a truncated model is trustworthy."""
