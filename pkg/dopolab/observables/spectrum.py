"""Noise-spectrum estimators for simulated quadrature ensembles.

Both estimators use finite-time transforms A(w) = dt_rec * sum_n dX_n e^{-i w t_n} over a
measurement window of length T and the normally ordered spectrum

    V(w) = 1 + (2/g^2) <A(w) A(-w)> / T

where <.> is the ensemble covariance (mean removed). Positive-P quadratures are complex per
trajectory, so the product is not conjugated. The stationary estimator works on FFT bins of
the post-transient segment; the windowed estimator evaluates a direct transform at the
requested frequencies over [t0, t0 + T].
"""

from __future__ import annotations

import math
from typing import Any, Dict, NamedTuple, Optional, Tuple

import numpy as np
from scipy.optimize import curve_fit

from ..analytics.spectra import SpectrumResult
from ..errors import InsufficientDataError, MinimizerError
from .stats import DEFAULT_GROUPS, group_ids, jackknife

MIN_SEGMENT = 16


class SpectralAccumulator:
    """Per-group sums of A(w), A(-w) and A(w)A(-w) for a fixed frequency grid and window."""

    def __init__(self, omega, duration: float, n_groups: int = DEFAULT_GROUPS):
        self.omega = np.asarray(omega, dtype=float)
        self.duration = float(duration)
        self.n_groups = int(n_groups)
        k = self.omega.size
        self.count = np.zeros(self.n_groups, dtype=np.int64)
        self.sum_pos = np.zeros((self.n_groups, k), dtype=complex)
        self.sum_neg = np.zeros((self.n_groups, k), dtype=complex)
        self.sum_prod = np.zeros((self.n_groups, k), dtype=complex)

    def add(self, a_pos: np.ndarray, a_neg: np.ndarray, groups: np.ndarray, mask: Optional[np.ndarray] = None) -> None:
        """Transforms have shape (n_omega, n)."""
        groups = np.asarray(groups)
        if mask is not None:
            a_pos, a_neg, groups = a_pos[:, mask], a_neg[:, mask], groups[mask]
        for g in np.unique(groups):
            sel = groups == g
            self.count[g] += int(sel.sum())
            self.sum_pos[g] += a_pos[:, sel].sum(axis=1)
            self.sum_neg[g] += a_neg[:, sel].sum(axis=1)
            self.sum_prod[g] += (a_pos[:, sel] * a_neg[:, sel]).sum(axis=1)

    def merge(self, other: "SpectralAccumulator") -> None:
        self.count += other.count
        self.sum_pos += other.sum_pos
        self.sum_neg += other.sum_neg
        self.sum_prod += other.sum_prod

    def _v_out(self, n, pos, neg, prod, g: float) -> np.ndarray:
        cov = prod / n - (pos / n) * (neg / n)
        return 1.0 + (2.0 / (g * g)) * cov.real / self.duration

    def result(self, g: float, meta: Optional[Dict[str, Any]] = None, strict: bool = True) -> SpectrumResult:
        n = int(self.count.sum())
        if n < 2:
            if strict:
                raise InsufficientDataError(f"spectrum needs at least two trajectories, got {n}")
            nan = np.full(self.omega.size, np.nan)
            return SpectrumResult(self.omega.copy(), nan, nan.copy(), dict(meta or {}, trajectories=n))
        P, N_, X = self.sum_pos.sum(axis=0), self.sum_neg.sum(axis=0), self.sum_prod.sum(axis=0)
        v = self._v_out(n, P, N_, X, g)
        live = [gr for gr in np.flatnonzero(self.count) if n - self.count[gr] >= 1]
        if len(live) >= 2:
            loo = np.stack(
                [
                    self._v_out(n - self.count[gr], P - self.sum_pos[gr], N_ - self.sum_neg[gr], X - self.sum_prod[gr], g)
                    for gr in live
                ]
            )
            _, err = jackknife(loo)
        else:
            err = np.full_like(v, np.nan)
        info = {"trajectories": n, "duration": self.duration, "groups": len(live)}
        info.update(meta or {})
        return SpectrumResult(omega=self.omega.copy(), v_out=v, err=err, meta=info)


def stationary_bins(n_samples: int, dt_rec: float, omega_max: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Non-negative FFT bin indices and their frequencies 2 pi k / (N dt_rec)."""
    k = np.arange(n_samples // 2 + 1)
    omega = 2.0 * math.pi * k / (n_samples * dt_rec)
    if omega_max is not None:
        keep = omega <= omega_max + 1e-12
        k, omega = k[keep], omega[keep]
    return k, omega


def stationary_transforms(segment: np.ndarray, dt_rec: float, bins: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    n = segment.shape[0]
    F = np.fft.fft(segment, axis=0)
    return dt_rec * F[bins], dt_rec * F[(n - bins) % n]


def windowed_transforms(window: np.ndarray, dt_rec: float, omega) -> Tuple[np.ndarray, np.ndarray]:
    omega = np.asarray(omega, dtype=float)
    t = np.arange(window.shape[0]) * dt_rec
    kernel = np.exp(-1j * np.outer(omega, t))
    return dt_rec * kernel @ window, dt_rec * np.conj(kernel) @ window


def post_cutoff(times: np.ndarray, cutoff: float) -> slice:
    start = int(np.searchsorted(np.asarray(times), cutoff, side="right"))
    return slice(start, len(times))


def window_slice(times: np.ndarray, t0: float, T: float) -> slice:
    times = np.asarray(times, dtype=float)
    dt_rec = times[1] - times[0]
    start = int(round((t0 - times[0]) / dt_rec))
    length = int(round(T / dt_rec))
    if start < 0 or length < 1 or start + length > len(times):
        raise InsufficientDataError(
            f"window [{t0}, {t0 + T}] does not fit the simulated span [{times[0]}, {times[-1]}]"
        )
    return slice(start, start + length)


def stationary_spectrum(
    X: np.ndarray,
    times: np.ndarray,
    cutoff: float,
    g: float,
    omega_max: Optional[float] = None,
    indices=None,
    n_groups: int = DEFAULT_GROUPS,
    mask: Optional[np.ndarray] = None,
) -> SpectrumResult:
    """Spectrum of a stationary (n_times, n) quadrature ensemble using samples after ``cutoff``."""
    times = np.asarray(times, dtype=float)
    sl = post_cutoff(times, cutoff)
    segment = np.asarray(X)[sl]
    if segment.shape[0] < MIN_SEGMENT:
        raise InsufficientDataError(f"only {segment.shape[0]} samples after the cutoff tau = {cutoff}")
    dt_rec = times[1] - times[0]
    bins, omega = stationary_bins(segment.shape[0], dt_rec, omega_max)
    acc = SpectralAccumulator(omega, segment.shape[0] * dt_rec, n_groups)
    if indices is None:
        indices = np.arange(segment.shape[1])
    a_pos, a_neg = stationary_transforms(segment, dt_rec, bins)
    acc.add(a_pos, a_neg, group_ids(indices, n_groups), mask)
    return acc.result(g, {"estimator": "stationary", "cutoff": cutoff})


def windowed_spectrum(
    X: np.ndarray,
    times: np.ndarray,
    omega,
    T: float,
    g: float,
    t0: float = 0.0,
    indices=None,
    n_groups: int = DEFAULT_GROUPS,
    mask: Optional[np.ndarray] = None,
) -> SpectrumResult:
    """Finite-window spectrum over [t0, t0 + T]; needs no stationarity."""
    sl = window_slice(times, t0, T)
    window = np.asarray(X)[sl]
    dt_rec = float(times[1] - times[0])
    acc = SpectralAccumulator(np.atleast_1d(omega), window.shape[0] * dt_rec, n_groups)
    if indices is None:
        indices = np.arange(window.shape[1])
    a_pos, a_neg = windowed_transforms(window, dt_rec, acc.omega)
    acc.add(a_pos, a_neg, group_ids(indices, n_groups), mask)
    return acc.result(g, {"estimator": "windowed", "t0": t0, "T": T})


class DarkFit(NamedTuple):
    a: float
    b: float
    a_err: float
    b_err: float


def dip_model(omega, a: float, b: float):
    """a(w/2)^2 / [b + (w/2)^2]: high-frequency level a, squared corner b; Y_d at a = b = 1."""
    q = (np.asarray(omega, dtype=float) / 2.0) ** 2
    return a * q / (b + q)


def fit_dark_spectrum(result: SpectrumResult, p0=(1.0, 1.0)) -> DarkFit:
    """Least-squares fit of :func:`dip_model` to an estimated phase-quadrature spectrum.

    The form a(w/2)^2 / [b + a(w/2)^2] only depends on a/b, so the level and corner are fitted
    separately instead.
    """
    omega, v = result.omega, result.v_out
    sigma = None
    if result.has_errors and np.all(np.isfinite(result.err)) and np.all(result.err > 0):
        sigma = result.err
    try:
        popt, pcov = curve_fit(dip_model, omega, v, p0=p0, sigma=sigma, absolute_sigma=sigma is not None)
    except (RuntimeError, TypeError) as exc:
        raise MinimizerError(f"dark spectrum fit failed: {exc}") from exc
    perr = np.sqrt(np.diag(pcov))
    return DarkFit(float(popt[0]), float(popt[1]), float(perr[0]), float(perr[1]))


__all__ = [
    "DarkFit",
    "SpectralAccumulator",
    "dip_model",
    "fit_dark_spectrum",
    "post_cutoff",
    "stationary_bins",
    "stationary_spectrum",
    "stationary_transforms",
    "window_slice",
    "windowed_spectrum",
    "windowed_transforms",
]
