"""Exception hierarchy shared by every dopolab module."""

from __future__ import annotations


class DopoError(Exception):
    pass


class ParameterError(DopoError, ValueError):
    """Raised when a model or detection parameter is outside its domain."""


class GeometryError(ParameterError):
    """Raised when the cavity geometry leaves the waist formula undefined (2R/L <= 1)."""


class BelowThresholdError(ParameterError):
    """Raised when an above-threshold quantity is requested with sigma <= 1."""


class OrientationUndefinedError(DopoError, ValueError):
    """Raised when the pattern orientation cannot be defined (vanishing signal amplitudes)."""


class DivergenceError(DopoError, FloatingPointError):
    """Raised when a stochastic trajectory leaves the finite numbers."""

    def __init__(self, message: str, trajectory: int | None = None, step: int | None = None):
        super().__init__(message)
        self.trajectory = trajectory
        self.step = step


class MinimizerError(DopoError, RuntimeError):
    """Raised when a one-dimensional numeric minimization does not converge."""


class InsufficientDataError(DopoError, ValueError):
    """Raised when an estimator does not have enough samples to work with."""


class ConfigError(DopoError, ValueError):
    """Raised for malformed or inconsistent run configurations."""


class ParameterMismatchError(ConfigError):
    """Raised when simulated and analytic parameter records disagree."""


class DivergenceThresholdExceeded(DopoError, RuntimeError):
    """Raised when too many trajectories of a run diverge."""

    def __init__(self, fraction: float, threshold: float):
        super().__init__(
            f"Divergent trajectory fraction {fraction:.4%} exceeds threshold {threshold:.4%}"
        )
        self.fraction = fraction
        self.threshold = threshold


__all__ = [
    "BelowThresholdError",
    "ConfigError",
    "DivergenceError",
    "DivergenceThresholdExceeded",
    "DopoError",
    "GeometryError",
    "InsufficientDataError",
    "MinimizerError",
    "OrientationUndefinedError",
    "ParameterError",
    "ParameterMismatchError",
]
