"""Model parameters: physical cavity setup and the dimensionless (sigma, kappa, g) triple.

All physical quantities are SI. Once the dimensionless parameters are formed, time is
measured in units of the signal decay time 1/gamma_s.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Dict, Literal, NamedTuple, Optional

from scipy import constants

from .errors import GeometryError, ParameterError

# CODATA values as shipped by scipy.constants
C_LIGHT = constants.c
HBAR = constants.hbar
EPS0 = constants.epsilon_0

Branch = Literal["pump", "signal"]


@dataclass(frozen=True)
class PhysicalSetup:
    """Fabry-Perot DOPO with two identical spherical mirrors and a thin crystal at the waist."""

    lambda_p: float = 400e-9
    R: float = 1.0
    L: float = 0.1
    l: float = 1e-3
    n: float = 2.5
    chi2: float = 2e-12
    T_p: float = 0.1
    T_s: float = 0.01
    P_laser: float = 1.0

    def __post_init__(self) -> None:
        for name in ("lambda_p", "R", "L", "l", "n", "chi2"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ParameterError(f"{name} must be positive and finite, got {value!r}")
        for name in ("T_p", "T_s"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ParameterError(f"{name} must lie in (0, 1), got {value!r}")
        if not (self.P_laser >= 0 and math.isfinite(self.P_laser)):
            raise ParameterError(f"P_laser must be non-negative, got {self.P_laser!r}")

    @property
    def lambda_s(self) -> float:
        return 2.0 * self.lambda_p

    def replace(self, **changes: float) -> "PhysicalSetup":
        values = asdict(self)
        values.update(changes)
        return PhysicalSetup(**values)


class CavityRates(NamedTuple):
    gamma_p: float
    gamma_s: float
    chi: float
    E_p: float


@dataclass(frozen=True)
class DimensionlessParams:
    """The three parameters governing the rescaled Langevin equations.

    ``rho`` and ``D`` are ``None`` below (or at) threshold, where no bright pattern exists.
    """

    sigma: float
    kappa: float
    g: float

    def __post_init__(self) -> None:
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise ParameterError(f"sigma must be non-negative, got {self.sigma!r}")
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise ParameterError(f"kappa must be positive, got {self.kappa!r}")
        if not (self.g > 0 and math.isfinite(self.g)):
            raise ParameterError(f"g must be positive, got {self.g!r}")

    @property
    def above_threshold(self) -> bool:
        return self.sigma > 1.0

    @property
    def d(self) -> float:
        return self.g * self.g / 4.0

    @property
    def rho(self) -> Optional[float]:
        if self.sigma < 1.0:
            return None
        return math.sqrt(self.sigma - 1.0)

    @property
    def D(self) -> Optional[float]:
        if not self.above_threshold:
            return None
        return self.d / (self.sigma - 1.0)

    def as_dict(self) -> Dict[str, Optional[float]]:
        return {
            "sigma": self.sigma,
            "kappa": self.kappa,
            "g": self.g,
            "d": self.d,
            "rho": self.rho,
            "D": self.D,
            "above_threshold": self.above_threshold,
        }


def waist_radius(setup: PhysicalSetup, branch: Branch = "pump") -> float:
    """Beam radius at the waist plane, w_j^2 = (lambda_j L / 2 pi) sqrt(2R/L - 1)."""
    if branch not in ("pump", "signal"):
        raise ParameterError(f"branch must be 'pump' or 'signal', got {branch!r}")
    ratio = 2.0 * setup.R / setup.L
    if ratio <= 1.0:
        raise GeometryError(f"2R/L = {ratio:.6g} must exceed 1 for a stable resonator waist")
    wavelength = setup.lambda_p if branch == "pump" else setup.lambda_s
    return math.sqrt(wavelength * setup.L / (2.0 * math.pi) * math.sqrt(ratio - 1.0))


def decay_rate(setup: PhysicalSetup, branch: Branch) -> float:
    transmission = setup.T_p if branch == "pump" else setup.T_s
    return C_LIGHT * transmission / (2.0 * setup.L)


def derived_rates(setup: PhysicalSetup) -> CavityRates:
    """Return (gamma_p, gamma_s, chi, E_p) in s^-1."""
    gamma_p = decay_rate(setup, "pump")
    gamma_s = decay_rate(setup, "signal")
    w_p = waist_radius(setup, "pump")
    chi = (
        3.0 * math.pi * setup.chi2 * setup.l / w_p
        * math.sqrt(HBAR / EPS0)
        * (C_LIGHT / (setup.n * setup.L * setup.lambda_p)) ** 1.5
    )
    E_p = math.sqrt(
        setup.n * setup.lambda_p * gamma_p * setup.P_laser / (2.0 * math.pi * HBAR * C_LIGHT)
    )
    return CavityRates(gamma_p=gamma_p, gamma_s=gamma_s, chi=chi, E_p=E_p)


def threshold_pump_amplitude(setup: PhysicalSetup) -> float:
    rates = derived_rates(setup)
    return rates.gamma_p * rates.gamma_s / rates.chi


def pump_power_for_sigma(setup: PhysicalSetup, sigma: float) -> float:
    """Laser power (W) that places the DOPO at ``sigma`` times threshold."""
    if not (sigma >= 0 and math.isfinite(sigma)):
        raise ParameterError(f"sigma must be non-negative, got {sigma!r}")
    rates = derived_rates(setup)
    E_p = sigma * rates.gamma_p * rates.gamma_s / rates.chi
    return E_p * E_p * 2.0 * math.pi * HBAR * C_LIGHT / (setup.n * setup.lambda_p * rates.gamma_p)


def dimensionless(setup: PhysicalSetup) -> DimensionlessParams:
    """kappa = gamma_p/gamma_s, sigma = E_p chi/(gamma_p gamma_s), g = chi/sqrt(gamma_p gamma_s)."""
    rates = derived_rates(setup)
    product = rates.gamma_p * rates.gamma_s
    return DimensionlessParams(
        sigma=rates.E_p * rates.chi / product,
        kappa=rates.gamma_p / rates.gamma_s,
        g=rates.chi / math.sqrt(product),
    )


__all__ = [
    "C_LIGHT",
    "CavityRates",
    "DimensionlessParams",
    "EPS0",
    "HBAR",
    "PhysicalSetup",
    "decay_rate",
    "derived_rates",
    "dimensionless",
    "pump_power_for_sigma",
    "threshold_pump_amplitude",
    "waist_radius",
]
