"""Drift and noise of the positive-P Langevin equations.

Three representations share one interface. States are complex arrays of shape
(n_components, n_trajectories):

* ``full``       (b0, b0+, b+1, b+1+, b-1, b-1+)
* ``reduced``    (b0, b0+, b+1, b+1+) with b-1 = conj(b+1) and b-1+ = conj(b+1+)
* ``adiabatic``  (b+1, b+1+, b-1, b-1+) with the pump slaved to the signal

All equations are read in the Stratonovich sense. The square roots in the noise coefficients take
the principal branch.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Literal, Type

import numpy as np

from ..classical import SteadyState
from ..errors import ConfigError
from ..params import DimensionlessParams

log = logging.getLogger(__name__)

SystemName = Literal["full", "reduced", "adiabatic"]


@dataclass
class FieldState:
    """Six positive-P amplitudes, each an array over trajectories."""

    beta0: np.ndarray
    beta0_plus: np.ndarray
    beta_p1: np.ndarray
    beta_p1_plus: np.ndarray
    beta_m1: np.ndarray
    beta_m1_plus: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.stack(
            [
                np.asarray(v, dtype=complex)
                for v in (self.beta0, self.beta0_plus, self.beta_p1, self.beta_p1_plus, self.beta_m1, self.beta_m1_plus)
            ]
        )

    @classmethod
    def from_array(cls, y: np.ndarray) -> "FieldState":
        return cls(*(y[k] for k in range(6)))

    @classmethod
    def from_steady(cls, steady: SteadyState, n: int = 1) -> "FieldState":
        """Broadcast a classical steady state (beta^+ = beta^*) over ``n`` trajectories."""
        doubled = steady.doubled()
        return cls.from_array(np.repeat(doubled[:, None], n, axis=1))


def principal_sqrt(z: np.ndarray) -> np.ndarray:
    return np.sqrt(np.asarray(z, dtype=complex))


class BranchMonitor:
    """Counts crossings of the negative real axis by the argument of a square root."""

    def __init__(self) -> None:
        self.crossings = 0
        self._prev_imag: np.ndarray | None = None

    def update(self, z: np.ndarray) -> None:
        imag = np.imag(z)
        if self._prev_imag is not None and self._prev_imag.shape == imag.shape:
            flipped = (np.real(z) < 0) & (np.signbit(imag) != np.signbit(self._prev_imag))
            count = int(np.count_nonzero(flipped))
            if count:
                self.crossings += count
                log.debug("[sde] %d sqrt branch crossing(s) of the pump amplitude", count)
        self._prev_imag = imag.copy()


class LangevinSystem:
    """Drift A(y) and noise B(y) W of one representation."""

    name: str = ""
    n_components: int = 0

    def __init__(self, params: DimensionlessParams):
        self.params = params

    def drift(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def noise(self, y: np.ndarray, W: np.ndarray, W_plus: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def pump(self, y: np.ndarray) -> np.ndarray:
        """(b0, b0+) of the state, derived when the pump is not a variable."""
        return y[:2]

    def expand(self, y: np.ndarray) -> np.ndarray:
        """Six-component array in the full ordering."""
        raise NotImplementedError

    def initial(self, steady: SteadyState, n: int) -> np.ndarray:
        raise NotImplementedError


class FullSystem(LangevinSystem):
    name = "full"
    n_components = 6

    def drift(self, y: np.ndarray) -> np.ndarray:
        p = self.params
        b0, b0p, bp, bpp, bm, bmp = y
        out = np.empty_like(y)
        out[0] = p.kappa * (p.sigma - b0 - bp * bm)
        out[1] = p.kappa * (p.sigma - b0p - bpp * bmp)
        out[2] = -bp + b0 * bmp
        out[3] = -bpp + b0p * bm
        out[4] = -bm + b0 * bpp
        out[5] = -bmp + b0p * bp
        return out

    def noise(self, y: np.ndarray, W: np.ndarray, W_plus: np.ndarray) -> np.ndarray:
        g = self.params.g
        root = g * principal_sqrt(y[0])
        root_plus = g * principal_sqrt(y[1])
        out = np.zeros_like(y)
        out[2] = root * W
        out[3] = root_plus * W_plus
        out[4] = root * np.conj(W)
        out[5] = root_plus * np.conj(W_plus)
        return out

    def expand(self, y: np.ndarray) -> np.ndarray:
        return y

    def initial(self, steady: SteadyState, n: int) -> np.ndarray:
        return FieldState.from_steady(steady, n).as_array()


class ReducedSystem(LangevinSystem):
    """Conjugate-pair representation; valid when the initial OAM pairs are complex conjugate."""

    name = "reduced"
    n_components = 4

    def drift(self, y: np.ndarray) -> np.ndarray:
        p = self.params
        b0, b0p, bp, bpp = y
        out = np.empty_like(y)
        out[0] = p.kappa * (p.sigma - b0 - bp * np.conj(bp))
        out[1] = p.kappa * (p.sigma - b0p - bpp * np.conj(bpp))
        out[2] = -bp + b0 * np.conj(bpp)
        out[3] = -bpp + b0p * np.conj(bp)
        return out

    def noise(self, y: np.ndarray, W: np.ndarray, W_plus: np.ndarray) -> np.ndarray:
        g = self.params.g
        out = np.zeros_like(y)
        out[2] = g * principal_sqrt(y[0]) * W
        out[3] = g * principal_sqrt(y[1]) * W_plus
        return out

    def expand(self, y: np.ndarray) -> np.ndarray:
        return np.stack([y[0], y[1], y[2], y[3], np.conj(y[2]), np.conj(y[3])])

    def initial(self, steady: SteadyState, n: int) -> np.ndarray:
        return FieldState.from_steady(steady, n).as_array()[:4]


class AdiabaticSystem(LangevinSystem):
    """Signal-only equations with the pump eliminated, b0 = sigma - b+1 b-1."""

    name = "adiabatic"
    n_components = 4

    def pump(self, y: np.ndarray) -> np.ndarray:
        sigma = self.params.sigma
        bp, bpp, bm, bmp = y
        return np.stack([sigma - bp * bm, sigma - bpp * bmp])

    def drift(self, y: np.ndarray) -> np.ndarray:
        loss = 1.0 - self.params.g ** 2 / 4.0
        bp, bpp, bm, bmp = y
        b0, b0p = self.pump(y)
        out = np.empty_like(y)
        out[0] = -loss * bp + b0 * bmp
        out[1] = -loss * bpp + b0p * bm
        out[2] = -loss * bm + b0 * bpp
        out[3] = -loss * bmp + b0p * bp
        return out

    def noise(self, y: np.ndarray, W: np.ndarray, W_plus: np.ndarray) -> np.ndarray:
        g = self.params.g
        b0, b0p = self.pump(y)
        root = g * principal_sqrt(b0)
        root_plus = g * principal_sqrt(b0p)
        return np.stack([root * W, root_plus * W_plus, root * np.conj(W), root_plus * np.conj(W_plus)])

    def expand(self, y: np.ndarray) -> np.ndarray:
        b0, b0p = self.pump(y)
        return np.stack([b0, b0p, y[0], y[1], y[2], y[3]])

    def initial(self, steady: SteadyState, n: int) -> np.ndarray:
        return FieldState.from_steady(steady, n).as_array()[2:]


SYSTEMS: Dict[str, Type[LangevinSystem]] = {
    FullSystem.name: FullSystem,
    ReducedSystem.name: ReducedSystem,
    AdiabaticSystem.name: AdiabaticSystem,
}


def make_system(name: str, params: DimensionlessParams) -> LangevinSystem:
    try:
        return SYSTEMS[name](params)
    except KeyError:
        raise ConfigError(f"unknown system {name!r}; expected one of {sorted(SYSTEMS)}") from None


def drift_full(state: FieldState, params: DimensionlessParams) -> FieldState:
    return FieldState.from_array(FullSystem(params).drift(state.as_array()))


def diffusion_full(state: FieldState, params: DimensionlessParams) -> np.ndarray:
    """Noise coefficients (g sqrt(b0), g sqrt(b0+)) multiplying (zeta, zeta*) and (zeta+, [zeta+]*)."""
    y = state.as_array()
    return np.stack([params.g * principal_sqrt(y[0]), params.g * principal_sqrt(y[1])])


def drift_adiabatic(y: np.ndarray, params: DimensionlessParams) -> np.ndarray:
    return AdiabaticSystem(params).drift(np.asarray(y, dtype=complex))


def drift_reduced(y: np.ndarray, params: DimensionlessParams) -> np.ndarray:
    return ReducedSystem(params).drift(np.asarray(y, dtype=complex))


def diffusion_reduced(y: np.ndarray, params: DimensionlessParams) -> np.ndarray:
    y = np.asarray(y, dtype=complex)
    return np.stack([params.g * principal_sqrt(y[0]), params.g * principal_sqrt(y[1])])


__all__ = [
    "AdiabaticSystem",
    "BranchMonitor",
    "FieldState",
    "FullSystem",
    "LangevinSystem",
    "ReducedSystem",
    "SYSTEMS",
    "diffusion_full",
    "diffusion_reduced",
    "drift_adiabatic",
    "drift_full",
    "drift_reduced",
    "make_system",
    "principal_sqrt",
]
