"""Orientation, quadratures and ensemble estimators computed from simulated trajectories."""

from .quadratures import QuadratureObserver, dark_quadrature, fixed_quadratures, rotating_quadratures
from .spectrum import DarkFit, SpectralAccumulator, fit_dark_spectrum, stationary_spectrum, windowed_spectrum
from .stats import EnsembleStats, GroupedMoments, LinearFit, ensemble_variance, jackknife, linear_fit
from .theta import ThetaObserver, ThetaSeries, extract_theta, unwrap_theta

__all__ = [
    "DarkFit",
    "EnsembleStats",
    "GroupedMoments",
    "LinearFit",
    "QuadratureObserver",
    "SpectralAccumulator",
    "ThetaObserver",
    "ThetaSeries",
    "dark_quadrature",
    "ensemble_variance",
    "extract_theta",
    "fit_dark_spectrum",
    "fixed_quadratures",
    "jackknife",
    "linear_fit",
    "rotating_quadratures",
    "stationary_spectrum",
    "unwrap_theta",
    "windowed_spectrum",
]
