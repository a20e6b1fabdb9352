"""Ensemble statistics accumulated in trajectory groups.

Trajectory k belongs to group k mod G. Sums are kept per group so that blocks integrated in any
order or process can be merged exactly, and delete-one-group jackknife errors come for free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, NamedTuple, Optional, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from ..errors import InsufficientDataError

DEFAULT_GROUPS = 32


def jackknife(leave_one_out) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and standard error from delete-one estimates stacked along axis 0."""
    est = np.asarray(leave_one_out)
    n = est.shape[0]
    if n < 2:
        raise InsufficientDataError("jackknife needs at least two groups")
    mean = est.mean(axis=0)
    err = np.sqrt((n - 1) / n * np.sum(np.abs(est - mean) ** 2, axis=0))
    return mean, err


def group_ids(indices, n_groups: int = DEFAULT_GROUPS) -> np.ndarray:
    return np.asarray(indices, dtype=np.int64) % n_groups


@dataclass
class EnsembleStats:
    times: np.ndarray
    mean: np.ndarray
    variance: np.ndarray
    stderr_mean: np.ndarray
    stderr_variance: np.ndarray
    n_trajectories: int
    n_diverged: int = 0
    meta: Dict[str, Any] = field(default_factory=dict)

    def normalized(self, D: float) -> "EnsembleStats":
        """Variance in units of D, the form in which free diffusion is a unit-slope line."""
        return EnsembleStats(
            self.times,
            self.mean,
            self.variance / D,
            self.stderr_mean,
            self.stderr_variance / D,
            self.n_trajectories,
            self.n_diverged,
            dict(self.meta, normalized_by=D),
        )

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"tau": self.times, "var_theta": self.variance, "stderr": self.stderr_variance})


class GroupedMoments:
    """Per-group count, sum and sum of squares of a real series of length ``n_times``."""

    def __init__(self, n_times: int, n_groups: int = DEFAULT_GROUPS):
        self.n_groups = int(n_groups)
        self.count = np.zeros(self.n_groups, dtype=np.int64)
        self.s1 = np.zeros((self.n_groups, n_times))
        self.s2 = np.zeros((self.n_groups, n_times))

    def add(self, values: np.ndarray, groups: np.ndarray, mask: Optional[np.ndarray] = None) -> None:
        """``values`` has shape (n_times, n); trajectories with ``mask`` False are skipped."""
        values = np.asarray(values, dtype=float)
        groups = np.asarray(groups)
        if mask is not None:
            values = values[:, mask]
            groups = groups[mask]
        for g in np.unique(groups):
            sel = groups == g
            block = values[:, sel]
            self.count[g] += int(sel.sum())
            self.s1[g] += block.sum(axis=1)
            self.s2[g] += (block * block).sum(axis=1)

    def merge(self, other: "GroupedMoments") -> None:
        self.count += other.count
        self.s1 += other.s1
        self.s2 += other.s2

    @staticmethod
    def _moments(n, s1, s2) -> Tuple[np.ndarray, np.ndarray]:
        mean = s1 / n
        var = (s2 - n * mean * mean) / (n - 1)
        return mean, np.maximum(var, 0.0)

    def stats(self, times: np.ndarray, n_diverged: int = 0, strict: bool = True) -> EnsembleStats:
        """With ``strict=False`` an ensemble of fewer than two trajectories yields NaN moments."""
        n = int(self.count.sum())
        if n < 2:
            if strict:
                raise InsufficientDataError(f"ensemble variance needs at least two trajectories, got {n}")
            nan = np.full(self.s1.shape[1], np.nan)
            return EnsembleStats(np.asarray(times, dtype=float), nan, nan, nan, nan, n, n_diverged)
        S1, S2 = self.s1.sum(axis=0), self.s2.sum(axis=0)
        mean, var = self._moments(n, S1, S2)
        live = np.flatnonzero(self.count)
        if live.size >= 2 and all(n - self.count[g] >= 2 for g in live):
            loo = np.stack([self._moments(n - self.count[g], S1 - self.s1[g], S2 - self.s2[g])[1] for g in live])
            _, err_var = jackknife(loo)
        else:
            err_var = np.full_like(var, np.nan)
        return EnsembleStats(
            times=np.asarray(times, dtype=float),
            mean=mean,
            variance=var,
            stderr_mean=np.sqrt(var / n),
            stderr_variance=err_var,
            n_trajectories=n,
            n_diverged=n_diverged,
        )


def ensemble_variance(
    theta: np.ndarray,
    times: np.ndarray,
    indices=None,
    n_groups: int = DEFAULT_GROUPS,
    mask: Optional[np.ndarray] = None,
) -> EnsembleStats:
    """Variance across trajectories of a (n_times, n) series, with jackknife errors."""
    theta = np.asarray(theta, dtype=float)
    if indices is None:
        indices = np.arange(theta.shape[1])
    moments = GroupedMoments(theta.shape[0], n_groups)
    moments.add(theta, group_ids(indices, n_groups), mask)
    n_diverged = 0 if mask is None else int(np.count_nonzero(~np.asarray(mask)))
    return moments.stats(times, n_diverged)


class LinearFit(NamedTuple):
    slope: float
    intercept: float
    stderr: float
    intercept_stderr: float
    r_squared: float


def linear_fit(x, y) -> LinearFit:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        raise InsufficientDataError("linear fit needs at least three points")
    res = stats.linregress(x, y)
    return LinearFit(
        slope=float(res.slope),
        intercept=float(res.intercept),
        stderr=float(res.stderr),
        intercept_stderr=float(res.intercept_stderr),
        r_squared=float(res.rvalue) ** 2 if math.isfinite(res.rvalue) else float("nan"),
    )


__all__ = [
    "DEFAULT_GROUPS",
    "EnsembleStats",
    "GroupedMoments",
    "LinearFit",
    "ensemble_variance",
    "group_ids",
    "jackknife",
    "linear_fit",
]
