"""Homodyne detection of the initially dark TEM01 mode with a local oscillator that does not follow
the pattern rotation.

Two predictions are provided: the compact small-d closed form, and a composition of the linear
correlations of the projections and of sin/cos theta integrated over the detection window.
"""

from __future__ import annotations

import logging
import math
from typing import Iterable, Optional

import numpy as np
import pandas as pd
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from ..errors import MinimizerError, ParameterError
from .linear import require_above_threshold
from .spectra import DetectionConfig, to_db

log = logging.getLogger(__name__)

# Coefficient of the diffusion term of the phase-quadrature part. With 4 the closed form is
# minimized exactly at optimal_detection_time() with value 1/T_opt.
DIFFUSION_TERM_COEFF = 4.0

OMEGA_SEARCH_MAX = 10.0
OMEGA_TOL = 1e-6


def _check(d: float, sigma: float) -> None:
    require_above_threshold(sigma)
    if not (d > 0 and math.isfinite(d)):
        raise ParameterError(f"d must be positive, got {d!r}")


def _rotation_term(omega: np.ndarray, T: float) -> np.ndarray:
    """8/w^2 (1 - sinc wT), continued to 4T^2/3 at w = 0."""
    x = omega * T
    out = np.empty_like(omega)
    small = np.abs(x) < 1e-4
    out[small] = 4.0 * T * T / 3.0 * (1.0 - x[small] ** 2 / 10.0)
    big = ~small
    out[big] = 8.0 / omega[big] ** 2 * (1.0 - np.sinc(x[big] / math.pi))
    return out


def amplitude_part(omega, T: float, d: float, sigma: float) -> np.ndarray:
    """S^0: rotation noise leaking the bright amplitude into the fixed mode.

    The O(d) correction is singular as w -> 0 (the small-d expansion is not uniform there), so at
    exactly w = 0 only the leading rotation term is kept.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    out = _rotation_term(omega, T)
    nz = omega != 0.0
    s1 = sigma - 1.0
    w2 = omega[nz] ** 2
    out[nz] -= 4.0 * d * T / (w2 * s1) * (6.0 * s1 * s1 + w2) / (4.0 * s1 * s1 + w2)
    return out


def _phase_corrections(w2: np.ndarray, T: float, d: float, sigma: float) -> np.ndarray:
    window = (8.0 - 2.0 * w2) / (T * (4.0 + w2) ** 2)
    diffusion = (
        DIFFUSION_TERM_COEFF * d * T * (2.0 * (sigma * sigma + 1.0) + w2)
        / ((sigma - 1.0) * (4.0 + w2) * (4.0 * sigma * sigma + w2))
    )
    return window + diffusion


def phase_part(omega, T: float, d: float, sigma: float) -> np.ndarray:
    """S^{pi/2}: dark-mode squeezing degraded by the finite window and by rotation."""
    w2 = np.atleast_1d(np.asarray(omega, dtype=float)) ** 2
    return -4.0 / (4.0 + w2) + _phase_corrections(w2, T, d, sigma)


def fixed_lo_spectrum(omega, config: DetectionConfig, d: float, sigma: float):
    """Small-d noise spectrum V = 1 + S^0 cos^2(phi) + S^{pi/2} sin^2(phi)."""
    _check(d, sigma)
    scalar = np.ndim(omega) == 0
    w2 = np.atleast_1d(np.asarray(omega, dtype=float)) ** 2
    c2 = math.cos(config.phi) ** 2
    s2 = math.sin(config.phi) ** 2
    # 1 - 4 s2/(4 + w2) written without cancellation, V reaches 1e-7 at small d
    value = (4.0 * c2 + w2) / (4.0 + w2) + s2 * _phase_corrections(w2, config.T, d, sigma)
    if c2 > 1e-30:
        value = value + c2 * amplitude_part(omega, config.T, d, sigma)
    return float(value[0]) if scalar else value


# ------------------------------------------------------------- composed from correlations


def _window_sin_integral(L: float, D: float) -> float:
    """(1/D) * integral_0^L e^{-Ds} sinh(Ds) ds, stable for D L -> 0."""
    x = 2.0 * D * L
    if x < 1e-3:
        return 0.5 * L * L * (1.0 - x / 3.0 + x * x / 12.0 - x ** 3 / 60.0)
    return (x + math.expm1(-x)) / (4.0 * D * D)


def _composed_kernel(u: float, T: float, phi: float, d: float, sigma: float) -> float:
    s1 = sigma - 1.0
    D = d / s1
    L = T - u
    js = _window_sin_integral(L, D)
    i_sin = D * js
    i_cos = L - i_sin
    k1 = -0.25 * math.exp(-2.0 * u)
    k2 = 0.25 / s1 * math.exp(-2.0 * s1 * u)
    k3 = 0.25 / sigma * math.exp(-2.0 * sigma * u)
    amplitude = js + k2 * i_sin
    phase = k1 * i_cos - k3 * i_sin
    return math.exp(-0.5 * D * u) * 2.0 * (
        math.cos(phi) ** 2 * amplitude + math.sin(phi) ** 2 * phase
    )


def fixed_lo_spectrum_composed(omega, config: DetectionConfig, d: float, sigma: float):
    """Windowed spectrum built from the closed-form two-time correlation of X_01^phi.

    No small-d expansion is made; this is the reference the simulated windowed estimator is
    compared with.
    """
    _check(d, sigma)
    T = config.T
    scalar = np.ndim(omega) == 0
    grid = np.atleast_1d(np.asarray(omega, dtype=float))
    out = np.empty_like(grid)
    args = (T, config.phi, d, sigma)
    for k, w in enumerate(grid):
        if w == 0.0:
            integral, _ = quad(_composed_kernel, 0.0, T, args=args, limit=500)
        else:
            integral, _ = quad(_composed_kernel, 0.0, T, args=args, weight="cos", wvar=abs(w), limit=500)
        out[k] = 1.0 + 4.0 / T * integral
    return float(out[0]) if scalar else out


# ------------------------------------------------------------- optima


def optimal_detection_time(sigma: float, d: float) -> float:
    """Window length minimizing the w = 0, phi = pi/2 spectrum; the minimum is 1/T_opt."""
    _check(d, sigma)
    return math.sqrt(sigma * sigma * (sigma - 1.0) / (d * (sigma * sigma + 1.0)))


def optimal_detection_time_numeric(sigma: float, d: float, phi: float = math.pi / 2, omega: float = 0.0) -> float:
    """Minimize the closed form over log T."""
    _check(d, sigma)

    def objective(log_t: float) -> float:
        return fixed_lo_spectrum(omega, DetectionConfig(phi=phi, T=math.exp(log_t), mode="fixed"), d, sigma)

    res = minimize_scalar(objective, bounds=(0.0, 40.0), method="bounded", options={"xatol": 1e-9})
    if not res.success:
        raise MinimizerError(f"detection time search failed: {res.message}")
    return math.exp(res.x)


def optimal_noise_frequency(phi: float, sigma: float, d: float, T: Optional[float] = None) -> float:
    """Frequency of maximal squeezing at window ``T`` (default the optimal window)."""
    _check(d, sigma)
    T = optimal_detection_time(sigma, d) if T is None else T
    config = DetectionConfig(phi=phi, T=T, mode="fixed")
    res = minimize_scalar(
        lambda w: fixed_lo_spectrum(w, config, d, sigma),
        bounds=(OMEGA_TOL, OMEGA_SEARCH_MAX),
        method="bounded",
        options={"xatol": OMEGA_TOL},
    )
    if not res.success:
        raise MinimizerError(f"noise frequency search failed for phi={phi}: {res.message}")
    at_zero = fixed_lo_spectrum(0.0, config, d, sigma)
    if at_zero <= res.fun:
        return 0.0
    log.debug("[fixed_lo] phi=%.6g omega_opt=%.6g V=%.6g", phi, res.x, res.fun)
    return float(res.x)


def fixed_lo_optimum_curve(phis: Iterable[float], sigma: float, d: float) -> pd.DataFrame:
    """V at (omega_opt, T_opt) against LO phase, with omega_opt itself."""
    T_opt = optimal_detection_time(sigma, d)
    rows = []
    for phi in phis:
        w_opt = optimal_noise_frequency(phi, sigma, d, T=T_opt)
        v = fixed_lo_spectrum(w_opt, DetectionConfig(phi=phi, T=T_opt, mode="fixed"), d, sigma)
        rows.append({"phi": phi, "omega_opt": w_opt, "T_opt": T_opt, "v_out": v, "v_out_db": float(to_db(v))})
    return pd.DataFrame(rows)


__all__ = [
    "DIFFUSION_TERM_COEFF",
    "amplitude_part",
    "fixed_lo_optimum_curve",
    "fixed_lo_spectrum",
    "fixed_lo_spectrum_composed",
    "optimal_detection_time",
    "optimal_detection_time_numeric",
    "optimal_noise_frequency",
    "phase_part",
]
