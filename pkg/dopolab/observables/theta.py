"""Pattern orientation within the positive-P representation.

The orientation is a half-angle, e^{2i theta} = b-1 b+1^+ / |b-1| |b+1^+|, so raw values have
period pi and unwrapping works in multiples of pi.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from ..errors import OrientationUndefinedError
from ..sde.systems import FieldState

log = logging.getLogger(__name__)

SUSPECT_JUMP = math.pi / 4


def raw_theta(state6: np.ndarray) -> np.ndarray:
    return 0.5 * np.angle(state6[4] * state6[3])


def unwrap_step(previous: Optional[np.ndarray], raw: np.ndarray) -> np.ndarray:
    """Continue an unwrapped series by the branch of ``raw`` closest to ``previous``."""
    if previous is None:
        return raw
    delta = raw - previous
    return previous + delta - math.pi * np.round(delta / math.pi)


def extract_theta(state: Union[FieldState, np.ndarray]):
    """Principal orientation in (-pi/2, pi/2]."""
    y = state.as_array() if isinstance(state, FieldState) else np.asarray(state, dtype=complex)
    if np.any(y[4] == 0) or np.any(y[3] == 0):
        raise OrientationUndefinedError("orientation undefined for vanishing b-1 or b+1^+")
    theta = raw_theta(y)
    # np.angle maps -pi to -pi; fold onto the closed upper end
    theta = np.where(theta <= -math.pi / 2, theta + math.pi, theta)
    return float(theta) if np.ndim(theta) == 0 else theta


@dataclass
class ThetaSeries:
    times: np.ndarray
    theta: np.ndarray
    raw: np.ndarray
    suspect: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    @property
    def has_suspect_jumps(self) -> bool:
        return self.suspect.size > 0


def unwrap_theta(raw, times: Optional[np.ndarray] = None) -> ThetaSeries:
    """Remove the pi ambiguity along axis 0.

    Steps whose unwrapped change still exceeds pi/4 are reported in ``suspect`` (row indices).
    """
    raw = np.asarray(raw, dtype=float)
    theta = np.unwrap(raw, period=math.pi, axis=0)
    steps = np.abs(np.diff(theta, axis=0))
    rows = np.flatnonzero(np.any(steps.reshape(steps.shape[0], -1) > SUSPECT_JUMP, axis=1)) + 1
    if rows.size:
        log.warning("[theta] %d suspect orientation jump(s), first at record %d", rows.size, int(rows[0]))
    if times is None:
        times = np.arange(raw.shape[0], dtype=float)
    return ThetaSeries(times=np.asarray(times, dtype=float), theta=theta, raw=raw, suspect=rows)


class ThetaObserver:
    """Collects the unwrapped orientation of every trajectory of a block at each record.

    Unwrapping is done incrementally, so only one row of history is needed to continue.
    """

    def __init__(self) -> None:
        self.values: Optional[np.ndarray] = None
        self.suspect_jumps = 0
        self._last: Optional[np.ndarray] = None

    def start(self, n_records: int, n_trajectories: int) -> None:
        self.values = np.zeros((n_records, n_trajectories))
        self.suspect_jumps = 0
        self._last = None

    def record(self, k: int, tau: float, state: np.ndarray) -> None:
        current = unwrap_step(self._last, raw_theta(state))
        if self._last is not None:
            self.suspect_jumps += int(np.count_nonzero(np.abs(current - self._last) > SUSPECT_JUMP))
        self.values[k] = current
        self._last = current


__all__ = ["SUSPECT_JUMP", "ThetaObserver", "ThetaSeries", "extract_theta", "raw_theta", "unwrap_step", "unwrap_theta"]
