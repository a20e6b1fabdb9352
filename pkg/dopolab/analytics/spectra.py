"""Closed-form squeezing spectra of the rotating bright and dark modes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Literal, NamedTuple

import numpy as np
import pandas as pd

from ..errors import ParameterError
from .linear import require_above_threshold, projection_spectrum

FrameMode = Literal["rotating", "fixed"]

DB_FLOOR = 1e-300


@dataclass(frozen=True)
class DetectionConfig:
    phi: float = math.pi / 2
    T: float = 100.0
    mode: FrameMode = "rotating"

    def __post_init__(self) -> None:
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ParameterError(f"detection time T must be positive, got {self.T!r}")
        if self.mode not in ("rotating", "fixed"):
            raise ParameterError(f"mode must be 'rotating' or 'fixed', got {self.mode!r}")


@dataclass
class SpectrumResult:
    """Noise spectrum on a frequency grid; vacuum level is 1.

    ``err`` is empty for closed forms and holds standard errors for estimates.
    """

    omega: np.ndarray
    v_out: np.ndarray
    err: np.ndarray = field(default_factory=lambda: np.empty(0))
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def has_errors(self) -> bool:
        return self.err.size == self.v_out.size and self.v_out.size > 0

    def to_frame(self):
        data = {"omega": self.omega, "v_out": self.v_out}
        if self.has_errors:
            data["stderr"] = self.err
        return pd.DataFrame(data)

    def in_db(self) -> np.ndarray:
        return to_db(self.v_out)


class BrightDarkSpectra(NamedTuple):
    X_bright: np.ndarray
    Y_bright: np.ndarray
    X_dark: np.ndarray
    Y_dark: np.ndarray


def bright_dark_spectra(omega, sigma: float) -> BrightDarkSpectra:
    """Amplitude (X) and phase (Y) quadrature spectra of the bright and dark modes."""
    require_above_threshold(sigma)
    w2 = np.asarray(omega, dtype=float) ** 2 / 4.0
    x_bright = 1.0 + 1.0 / ((sigma - 1.0) ** 2 + w2)
    y_bright = 1.0 - 1.0 / (sigma * sigma + w2)
    x_dark = np.ones_like(w2)
    y_dark = 1.0 - 1.0 / (1.0 + w2)
    return BrightDarkSpectra(x_bright, y_bright, x_dark, y_dark)


def dark_quadrature_spectrum(omega, phi: float):
    """Rotating dark-mode quadrature at LO phase ``phi``; every phase but 0 is squeezed."""
    w2 = np.asarray(omega, dtype=float) ** 2 / 4.0
    value = 1.0 - math.sin(phi) ** 2 / (1.0 + w2)
    return float(value) if np.ndim(value) == 0 else value


def dark_quadrature_product(omega):
    """V(X_d) * V(Y_d); stays below 1 at every finite frequency."""
    w2 = np.asarray(omega, dtype=float) ** 2 / 4.0
    return 1.0 - 1.0 / (1.0 + w2)


def dark_phase_from_projection(omega, sigma: float, g: float):
    """Y_d spectrum rebuilt from the c1 spectrum: 1 + (2/g^2) * 2 * C1(omega)."""
    return 1.0 + (2.0 / (g * g)) * 2.0 * np.asarray(projection_spectrum(1, omega, sigma, g))


def fit_function(omega, a: float, b: float):
    """Squeezing-dip model a(w/2)^2 / [b + a(w/2)^2]; equals the Y_d spectrum at a = b = 1."""
    q = a * (np.asarray(omega, dtype=float) / 2.0) ** 2
    return q / (b + q)


def to_db(v):
    """10 log10 V, clamped away from log(0)."""
    return 10.0 * np.log10(np.maximum(np.asarray(v, dtype=float), DB_FLOOR))


__all__ = [
    "BrightDarkSpectra",
    "DetectionConfig",
    "SpectrumResult",
    "bright_dark_spectra",
    "dark_phase_from_projection",
    "dark_quadrature_product",
    "dark_quadrature_spectrum",
    "fit_function",
    "to_db",
]
