"""Closed-form results of the linearized theory."""

from .brackets import BracketResult, poisson_bracket, poisson_brackets, reference_brackets
from .fixed_lo import (
    fixed_lo_optimum_curve,
    fixed_lo_spectrum,
    fixed_lo_spectrum_composed,
    optimal_detection_time,
    optimal_detection_time_numeric,
    optimal_noise_frequency,
)
from .linear import (
    Eigensystem4,
    build_L,
    diffusion_coefficient,
    eigensystem,
    full_linear_matrix,
    goldstone_check,
    orientation_variance,
    projection_correlation,
    projection_spectrum,
    wiener_trig_correlations,
)
from .spectra import (
    DetectionConfig,
    SpectrumResult,
    bright_dark_spectra,
    dark_quadrature_product,
    dark_quadrature_spectrum,
    fit_function,
    to_db,
)

__all__ = [
    "BracketResult",
    "DetectionConfig",
    "Eigensystem4",
    "SpectrumResult",
    "bright_dark_spectra",
    "build_L",
    "dark_quadrature_product",
    "dark_quadrature_spectrum",
    "diffusion_coefficient",
    "eigensystem",
    "fit_function",
    "fixed_lo_optimum_curve",
    "fixed_lo_spectrum",
    "fixed_lo_spectrum_composed",
    "full_linear_matrix",
    "goldstone_check",
    "optimal_detection_time",
    "optimal_detection_time_numeric",
    "optimal_noise_frequency",
    "orientation_variance",
    "poisson_bracket",
    "poisson_brackets",
    "projection_correlation",
    "projection_spectrum",
    "reference_brackets",
    "to_db",
    "wiener_trig_correlations",
]
