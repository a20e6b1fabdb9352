"""Dark-mode quadratures in the rotating and the fixed frame.

The general dark quadrature at LO phase phi and frame angle psi is

    X = (i/sqrt2) e^{-i phi} (e^{i psi} b+1 - e^{-i psi} b-1)
      - (i/sqrt2) e^{i phi} (e^{-i psi} b+1^+ - e^{i psi} b-1^+)

with psi the instantaneous orientation (rotating frame) or a constant (fixed LO). Values are
complex per trajectory; only ensemble moments are physical.
"""

from __future__ import annotations

from typing import Literal, Optional, Sequence, Union

import numpy as np

from ..errors import ConfigError
from ..sde.systems import FieldState
from .theta import extract_theta, raw_theta, unwrap_step

Frame = Literal["rotating", "fixed"]

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def _quadrature(y: np.ndarray, phi: float, psi) -> np.ndarray:
    rot = np.exp(1j * np.asarray(psi))
    lo = np.exp(-1j * phi)
    first = lo * (rot * y[2] - np.conj(rot) * y[4])
    second = np.conj(lo) * (np.conj(rot) * y[3] - rot * y[5])
    return 1j * _INV_SQRT2 * (first - second)


def dark_quadrature(
    state: Union[FieldState, np.ndarray],
    phi: float,
    frame: Frame = "rotating",
    theta0: float = 0.0,
):
    y = state.as_array() if isinstance(state, FieldState) else np.asarray(state, dtype=complex)
    if frame == "rotating":
        psi = extract_theta(y)
    elif frame == "fixed":
        psi = theta0
    else:
        raise ConfigError(f"unknown frame {frame!r}")
    value = _quadrature(y, phi, psi)
    return complex(value) if np.ndim(value) == 0 else value


def rotating_quadratures(states: np.ndarray, phis: Sequence[float]) -> np.ndarray:
    """Shape (len(phis), n) for a (6, n) ensemble."""
    y = np.asarray(states, dtype=complex)
    psi = raw_theta(y)
    return np.stack([_quadrature(y, phi, psi) for phi in phis])


def fixed_quadratures(states: np.ndarray, phis: Sequence[float], theta0=0.0) -> np.ndarray:
    y = np.asarray(states, dtype=complex)
    return np.stack([_quadrature(y, phi, theta0) for phi in phis])


class QuadratureObserver:
    """Records dark quadratures of a block at each record time.

    In the fixed frame the LO orientation is locked per trajectory to the pattern orientation at
    record ``lock_record``; earlier records are left at zero.
    """

    def __init__(self, phis: Sequence[float], frame: Frame = "rotating", lock_record: int = 0):
        if frame not in ("rotating", "fixed"):
            raise ConfigError(f"unknown frame {frame!r}")
        self.phis = tuple(float(p) for p in phis)
        self.frame = frame
        self.lock_record = int(lock_record)
        self.values: Optional[np.ndarray] = None
        self.theta0: Optional[np.ndarray] = None
        self._theta: Optional[np.ndarray] = None

    def start(self, n_records: int, n_trajectories: int) -> None:
        self.values = np.zeros((len(self.phis), n_records, n_trajectories), dtype=complex)
        self.theta0 = None
        self._theta = None

    def record(self, k: int, tau: float, state: np.ndarray) -> None:
        if self.frame == "rotating":
            # unwrapped so the sign of the dark mode does not flip at theta = pi/2
            self._theta = unwrap_step(self._theta, raw_theta(state))
            self.values[:, k] = np.stack([_quadrature(state, phi, self._theta) for phi in self.phis])
            return
        if k < self.lock_record:
            return
        if self.theta0 is None:
            self.theta0 = raw_theta(state)
        self.values[:, k] = fixed_quadratures(state, self.phis, self.theta0)


__all__ = [
    "QuadratureObserver",
    "dark_quadrature",
    "fixed_quadratures",
    "rotating_quadratures",
]
