"""Discrete complex Wiener increments.

Each increment is W = sqrt(dt) [r(z, z') + i r(y, y')] with r(z, z') = sqrt(-log z) cos(2 pi z'),
so the real and imaginary parts are independent with variance dt/2 and <|W|^2> = dt.

Every trajectory owns a Philox stream keyed by (master_seed, trajectory index). Draws are taken in
chunks of steps per trajectory, so the numbers a trajectory sees do not depend on which block it
is integrated in or on the chunk length.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional, Sequence

import numpy as np

from ..errors import ParameterError

# uniforms per step: (z, z', y, y') for W and the same for W^+
UNIFORMS_PER_STEP = 8
DEFAULT_CHUNK = 256
# uniforms held in one refill across all trajectories of a stream
BUFFER_LIMIT = 1 << 22


def gaussian_pair(z, z_prime):
    """sqrt(-log z) cos(2 pi z'); zero mean, variance 1/2 for uniform inputs."""
    z = np.asarray(z, dtype=float)
    z_prime = np.asarray(z_prime, dtype=float)
    if np.any(z <= 0.0) or np.any(z > 1.0):
        raise ParameterError("z must lie in (0, 1]")
    value = np.sqrt(-np.log(z)) * np.cos(2.0 * math.pi * z_prime)
    return float(value) if value.ndim == 0 else value


class NoiseIncrement(NamedTuple):
    W: np.ndarray
    W_plus: np.ndarray


def _increments_from_uniforms(u: np.ndarray, dt: float) -> NoiseIncrement:
    """Map uniforms in [0, 1) of shape (..., 8) to a pair of complex increments."""
    z = 1.0 - u  # (0, 1]
    scale = math.sqrt(dt)

    def complex_draw(k: int) -> np.ndarray:
        re = np.sqrt(-np.log(z[..., k])) * np.cos(2.0 * math.pi * u[..., k + 1])
        im = np.sqrt(-np.log(z[..., k + 2])) * np.cos(2.0 * math.pi * u[..., k + 3])
        return scale * (re + 1j * im)

    return NoiseIncrement(W=complex_draw(0), W_plus=complex_draw(4))


def noise_increment(gen: np.random.Generator, dt: float, size: Optional[int] = None) -> NoiseIncrement:
    """One step's increments (W, W^+) drawn from ``gen``."""
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt!r}")
    shape = (UNIFORMS_PER_STEP,) if size is None else (size, UNIFORMS_PER_STEP)
    return _increments_from_uniforms(gen.random(shape), dt)


def trajectory_generator(master_seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for trajectory ``index``; a pure function of its arguments."""
    seq = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(seq))


class NoiseStream:
    """Increments for a block of trajectories, one independent stream each.

    ``next()`` returns arrays of shape (n_trajectories,) for the current step.
    """

    def __init__(self, master_seed: int, indices: Sequence[int], dt: float, chunk: Optional[int] = None):
        if not dt > 0:
            raise ParameterError(f"dt must be positive, got {dt!r}")
        if chunk is None:
            per_step = UNIFORMS_PER_STEP * max(len(indices), 1)
            chunk = max(1, min(DEFAULT_CHUNK, BUFFER_LIMIT // per_step))
        if chunk < 1:
            raise ParameterError("chunk must be at least 1")
        self.master_seed = int(master_seed)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.dt = float(dt)
        self.chunk = int(chunk)
        self._gens = [trajectory_generator(self.master_seed, k) for k in self.indices]
        self._buffer: Optional[NoiseIncrement] = None
        self._pos = self.chunk
        self.steps_drawn = 0

    def __len__(self) -> int:
        return len(self._gens)

    def _refill(self) -> None:
        u = np.stack([gen.random((self.chunk, UNIFORMS_PER_STEP)) for gen in self._gens])
        self._buffer = _increments_from_uniforms(u, self.dt)
        self._pos = 0

    def next(self) -> NoiseIncrement:
        if self._pos >= self.chunk:
            self._refill()
        k = self._pos
        self._pos += 1
        self.steps_drawn += 1
        return NoiseIncrement(W=self._buffer.W[:, k], W_plus=self._buffer.W_plus[:, k])


__all__ = [
    "NoiseIncrement",
    "NoiseStream",
    "gaussian_pair",
    "noise_increment",
    "trajectory_generator",
]
