"""Semi-implicit midpoint integration of the Langevin ensembles.

Each step iterates the midpoint estimate

    y~(p) = y(n-1) + [dt A(y~(p-1)) + B(y~(p-1)) W] / 2,   y~(0) = y(n-1)

and then advances y(n) = y(n-1) + dt A(y~) + B(y~) W. The scheme converges to the Stratonovich
solution, so the equations need no drift correction.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

import numpy as np

from ..errors import ConfigError, DivergenceError
from ..params import DimensionlessParams
from .noise import NoiseIncrement, NoiseStream
from .systems import BranchMonitor, FieldState, LangevinSystem, make_system

log = logging.getLogger(__name__)

DEFAULT_DIVERGENCE_LIMIT = 1e6


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 3e-3
    tau_end: float = 30.0
    midpoint_iterations: int = 2
    system: str = "reduced"
    record_every: int = 10

    def __post_init__(self) -> None:
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError(f"dt must be positive, got {self.dt!r}")
        if not self.tau_end > 0:
            raise ConfigError(f"tau_end must be positive, got {self.tau_end!r}")
        if self.midpoint_iterations < 1:
            raise ConfigError("midpoint_iterations must be at least 1")
        if self.record_every < 1:
            raise ConfigError("record_every must be at least 1")
        steps = self.tau_end / self.dt
        if abs(steps - round(steps)) > 1e-6 * max(1.0, steps):
            raise ConfigError(f"tau_end={self.tau_end} is not an integer number of steps of dt={self.dt}")
        if round(steps) % self.record_every:
            raise ConfigError("record_every must divide the number of steps")

    @property
    def n_steps(self) -> int:
        return int(round(self.tau_end / self.dt))

    @property
    def n_records(self) -> int:
        return self.n_steps // self.record_every + 1

    @property
    def record_dt(self) -> float:
        return self.dt * self.record_every

    def record_times(self) -> np.ndarray:
        return np.arange(self.n_records) * self.record_dt


class Observer(Protocol):
    def start(self, n_records: int, n_trajectories: int) -> None: ...

    def record(self, k: int, tau: float, state: np.ndarray) -> None: ...


def step_semi_implicit(
    system: LangevinSystem,
    y: np.ndarray,
    dt: float,
    noise: NoiseIncrement,
    iterations: int = 2,
) -> np.ndarray:
    """Advance ``y`` by one step of length ``dt`` with the given increments."""
    mid = y
    for _ in range(iterations):
        mid = y + 0.5 * (dt * system.drift(mid) + system.noise(mid, noise.W, noise.W_plus))
    return y + dt * system.drift(mid) + system.noise(mid, noise.W, noise.W_plus)


def ito_euler_step(system: LangevinSystem, y: np.ndarray, dt: float, noise: NoiseIncrement) -> np.ndarray:
    """Euler-Maruyama step; converges to the Ito reading of the same equations."""
    return y + dt * system.drift(y) + system.noise(y, noise.W, noise.W_plus)


def check_finite(y: np.ndarray, step: int, indices: Sequence[int]) -> None:
    bad = ~np.all(np.isfinite(y), axis=0)
    if np.any(bad):
        first = int(np.flatnonzero(bad)[0])
        raise DivergenceError("non-finite state", trajectory=int(indices[first]), step=step)


@dataclass
class EnsembleRun:
    indices: np.ndarray
    final: np.ndarray
    diverged_step: np.ndarray  # -1 while finite
    branch_crossings: int = 0

    @property
    def alive(self) -> np.ndarray:
        return self.diverged_step < 0

    @property
    def n_diverged(self) -> int:
        return int(np.count_nonzero(~self.alive))


def integrate_ensemble(
    system: LangevinSystem,
    y0: np.ndarray,
    config: IntegratorConfig,
    stream: NoiseStream,
    observers: Sequence[Observer] = (),
    divergence_limit: float = DEFAULT_DIVERGENCE_LIMIT,
) -> EnsembleRun:
    """Integrate a block of trajectories side by side.

    A trajectory whose state becomes non-finite or exceeds ``divergence_limit`` in modulus is
    frozen at its last good state and reported through ``diverged_step``.
    """
    y = np.array(y0, dtype=complex, copy=True)
    if y.ndim != 2 or y.shape[0] != system.n_components:
        raise ConfigError(f"initial state must have shape ({system.n_components}, n), got {y.shape}")
    n = y.shape[1]
    if len(stream) != n:
        raise ConfigError("noise stream and initial state disagree on the number of trajectories")
    diverged = np.full(n, -1, dtype=np.int64)
    monitor = BranchMonitor()
    for obs in observers:
        obs.start(config.n_records, n)
        obs.record(0, 0.0, system.expand(y))
    dt = config.dt
    for step in range(1, config.n_steps + 1):
        inc = stream.next()
        with np.errstate(over="ignore", invalid="ignore"):
            y_new = step_semi_implicit(system, y, dt, inc, config.midpoint_iterations)
            bad = ~np.all(np.isfinite(y_new), axis=0) | np.any(np.abs(y_new) > divergence_limit, axis=0)
        fresh = bad & (diverged < 0)
        if np.any(fresh):
            for j in np.flatnonzero(fresh):
                log.warning("[sde] trajectory %d diverged at step %d", int(stream.indices[j]), step)
            diverged[fresh] = step
        frozen = diverged >= 0
        y = np.where(frozen[None, :], y, y_new)
        monitor.update(system.pump(y)[0])
        if step % config.record_every == 0:
            k = step // config.record_every
            full = system.expand(y)
            for obs in observers:
                obs.record(k, step * dt, full)
    if monitor.crossings:
        log.info("[sde] %d sqrt branch crossing(s) in block starting at %d", monitor.crossings, int(stream.indices[0]))
    return EnsembleRun(indices=stream.indices.copy(), final=y, diverged_step=diverged, branch_crossings=monitor.crossings)


@dataclass
class TrajectoryRecord:
    index: int
    final: FieldState
    status: str  # "ok" | "diverged"
    diverged_step: Optional[int] = None


def integrate_trajectory(
    initial: FieldState,
    config: IntegratorConfig,
    params: DimensionlessParams,
    master_seed: int,
    index: int = 0,
    observers: Sequence[Observer] = (),
) -> TrajectoryRecord:
    """Single trajectory ``index`` of the stream keyed by ``master_seed``; deterministic."""
    system = make_system(config.system, params)
    full0 = initial.as_array().reshape(6, -1)[:, :1]
    if config.system == "full":
        y0 = full0
    elif config.system == "reduced":
        y0 = full0[:4]
    else:
        y0 = full0[2:]
    stream = NoiseStream(master_seed, [index], config.dt)
    run = integrate_ensemble(system, y0, config, stream, observers)
    final = FieldState.from_array(system.expand(run.final)[:, 0])
    if run.n_diverged:
        return TrajectoryRecord(index, final, "diverged", int(run.diverged_step[0]))
    return TrajectoryRecord(index, final, "ok")


__all__ = [
    "EnsembleRun",
    "IntegratorConfig",
    "Observer",
    "TrajectoryRecord",
    "check_finite",
    "integrate_ensemble",
    "integrate_trajectory",
    "ito_euler_step",
    "step_semi_implicit",
]
