"""Scalar processes with known moments, used to verify the integrator.

Both processes speak the :class:`LangevinSystem` interface, so they run through the same step
functions and noise streams as the optical equations.
"""

from __future__ import annotations

import math
from typing import Literal

import numpy as np

from ..errors import ConfigError, ParameterError
from .integrator import ito_euler_step, step_semi_implicit
from .noise import NoiseStream
from .systems import LangevinSystem

Scheme = Literal["stratonovich", "ito"]


class OrnsteinUhlenbeck(LangevinSystem):
    """dy = -rate y dt + gamma dW with complex W; stationary <|y|^2> = gamma^2 / (2 rate)."""

    name = "ou"
    n_components = 1

    def __init__(self, rate: float = 1.0, gamma: float = 1.0):
        if not rate > 0:
            raise ParameterError(f"rate must be positive, got {rate!r}")
        self.rate = float(rate)
        self.gamma = float(gamma)

    def drift(self, y: np.ndarray) -> np.ndarray:
        return -self.rate * y

    def noise(self, y: np.ndarray, W: np.ndarray, W_plus: np.ndarray) -> np.ndarray:
        return self.gamma * W[None, :]

    def expand(self, y: np.ndarray) -> np.ndarray:
        return y

    @property
    def stationary_power(self) -> float:
        return self.gamma ** 2 / (2.0 * self.rate)


class GeometricNoise(LangevinSystem):
    """dy = a y dt + s y dB with the real Wiener increment dB = sqrt(2) Re W.

    From y(0) = 1 the mean at time t is exp((a + s^2/2) t) in the Stratonovich reading and
    exp(a t) in the Ito reading.
    """

    name = "geometric"
    n_components = 1

    def __init__(self, a: float = 0.0, s: float = 1.0):
        self.a = float(a)
        self.s = float(s)

    def drift(self, y: np.ndarray) -> np.ndarray:
        return self.a * y

    def noise(self, y: np.ndarray, W: np.ndarray, W_plus: np.ndarray) -> np.ndarray:
        return self.s * y * math.sqrt(2.0) * np.real(W)[None, :]

    def expand(self, y: np.ndarray) -> np.ndarray:
        return y

    def mean(self, t: float, scheme: Scheme = "stratonovich") -> float:
        extra = 0.5 * self.s ** 2 if scheme == "stratonovich" else 0.0
        return math.exp((self.a + extra) * t)

    def second_moment(self, t: float, scheme: Scheme = "stratonovich") -> float:
        extra = 2.0 * self.s ** 2 if scheme == "stratonovich" else self.s ** 2
        return math.exp((2.0 * self.a + extra) * t)


def endpoint_ensemble(
    system: LangevinSystem,
    y0: complex,
    dt: float,
    n_steps: int,
    master_seed: int,
    n: int,
    scheme: Scheme = "stratonovich",
    iterations: int = 2,
) -> np.ndarray:
    """States of ``n`` trajectories after ``n_steps`` steps, shape (n_components, n)."""
    if scheme not in ("stratonovich", "ito"):
        raise ConfigError(f"scheme must be stratonovich or ito, got {scheme!r}")
    stream = NoiseStream(master_seed, np.arange(n), dt)
    y = np.full((system.n_components, n), complex(y0))
    for _ in range(n_steps):
        inc = stream.next()
        if scheme == "stratonovich":
            y = step_semi_implicit(system, y, dt, inc, iterations)
        else:
            y = ito_euler_step(system, y, dt, inc)
    return y


__all__ = ["GeometricNoise", "OrnsteinUhlenbeck", "endpoint_ensemble"]
