"""Linearized fluctuation theory above threshold.

Fluctuations are expanded around the classical pattern of orientation theta and projected onto
the eigenvectors of the 4x4 signal matrix. The projection on w0 is the Goldstone direction and
drives the free diffusion of theta; the other three projections c1..c3 are Ornstein-Uhlenbeck
processes whose correlations and spectra are given here in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np

from ..errors import BelowThresholdError, ParameterError
from ..params import DimensionlessParams


def require_above_threshold(sigma: float) -> None:
    if not sigma > 1.0:
        raise BelowThresholdError(f"linearized theory needs sigma > 1, got {sigma!r}")


def build_L(sigma: float) -> np.ndarray:
    """Signal fluctuation matrix, ordering (b+1, b+1^+, b-1, b-1^+)."""
    require_above_threshold(sigma)
    s = float(sigma)
    return -np.array(
        [
            [s, 0.0, s - 1.0, -1.0],
            [0.0, s, -1.0, s - 1.0],
            [s - 1.0, -1.0, s, 0.0],
            [-1.0, s - 1.0, 0.0, s],
        ]
    )


@dataclass(frozen=True)
class Eigensystem4:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns w0..w3

    def project(self, b: np.ndarray) -> np.ndarray:
        """Projections c_m = w_m . b for fluctuation vectors stacked along the last axis."""
        return np.asarray(b) @ self.eigenvectors

    def residuals(self, L: np.ndarray) -> np.ndarray:
        """Norms of L w_m - lambda_m w_m, one per pair."""
        diff = L @ self.eigenvectors - self.eigenvectors * self.eigenvalues
        return np.linalg.norm(diff, axis=0)


def eigensystem(sigma: float) -> Eigensystem4:
    require_above_threshold(sigma)
    vectors = 0.5 * np.array(
        [
            [1.0, 1.0, 1.0, 1.0],
            [-1.0, 1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0, 1.0],
            [1.0, -1.0, 1.0, -1.0],
        ]
    )
    values = np.array([0.0, -2.0, -2.0 * (sigma - 1.0), -2.0 * sigma])
    return Eigensystem4(eigenvalues=values, eigenvectors=vectors)


def diffusion_coefficient(sigma: float, g: float) -> float:
    """D = d/(sigma - 1), with d = g^2/4."""
    require_above_threshold(sigma)
    return g * g / 4.0 / (sigma - 1.0)


def orientation_variance(tau, params: DimensionlessParams):
    """V_theta(tau) = D tau for the freely diffusing pattern orientation."""
    if params.D is None:
        raise BelowThresholdError("orientation is undefined below threshold")
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < 0):
        raise ParameterError("tau must be non-negative")
    out = params.D * tau_arr
    return float(out) if out.ndim == 0 else out


# ------------------------------------------------------------- projections c1..c3


def _projection_rate(m: int, sigma: float) -> Tuple[float, float]:
    """(decay rate, equal-time correlation / g^2) of projection c_m."""
    if m == 1:
        return 2.0, -0.25
    if m == 2:
        require_above_threshold(sigma)
        return 2.0 * (sigma - 1.0), 0.25 / (sigma - 1.0)
    if m == 3:
        if not sigma > 0:
            raise ParameterError("sigma must be positive")
        return 2.0 * sigma, 0.25 / sigma
    raise ParameterError(f"projection index must be 1, 2 or 3, got {m!r}")


def projection_correlation(m: int, dtau, sigma: float, g: float):
    """<c_m(tau) c_m(tau + dtau)> in the stationary linear regime."""
    rate, amplitude = _projection_rate(m, sigma)
    value = g * g * amplitude * np.exp(-rate * np.abs(np.asarray(dtau, dtype=float)))
    return float(value) if np.ndim(value) == 0 else value


def projection_spectrum(m: int, omega, sigma: float, g: float):
    """Fourier transform of :func:`projection_correlation` (kernel e^{-i omega tau})."""
    rate, amplitude = _projection_rate(m, sigma)
    omega = np.asarray(omega, dtype=float)
    value = g * g * amplitude * 2.0 * rate / (rate * rate + omega * omega)
    return float(value) if np.ndim(value) == 0 else value


class TrigCorrelations(NamedTuple):
    S: np.ndarray
    C: np.ndarray


def wiener_trig_correlations(tau1, tau2, D: float) -> TrigCorrelations:
    """<sin theta(t1) sin theta(t2)> and <cos theta(t1) cos theta(t2)> for theta(0) = 0."""
    if D < 0:
        raise ParameterError("D must be non-negative")
    tau1 = np.asarray(tau1, dtype=float)
    tau2 = np.asarray(tau2, dtype=float)
    if np.any(tau1 < 0) or np.any(tau2 < 0):
        raise ParameterError("times must be non-negative")
    envelope = np.exp(-D * (tau1 + tau2) / 2.0)
    shortest = D * np.minimum(tau1, tau2)
    S = envelope * np.sinh(shortest)
    C = envelope * np.cosh(shortest)
    if S.ndim == 0:
        return TrigCorrelations(float(S), float(C))
    return TrigCorrelations(S, C)


# ------------------------------------------------------------- pump included


def full_linear_matrix(sigma: float, kappa: float, as_printed: bool = False) -> np.ndarray:
    """6x6 fluctuation matrix with the pump kept, ordering (b0, b0+, b+1, b+1+, b-1, b-1+).

    The pump rows carry -kappa*rho as obtained by linearizing the pump equation. ``as_printed``
    drops the kappa factor there; both agree at kappa = 1 and share the w0', w1' eigenpairs.
    """
    require_above_threshold(sigma)
    if not kappa > 0:
        raise ParameterError(f"kappa must be positive, got {kappa!r}")
    rho = math.sqrt(sigma - 1.0)
    coupling = rho if as_printed else kappa * rho
    return np.array(
        [
            [-kappa, 0.0, -coupling, 0.0, -coupling, 0.0],
            [0.0, -kappa, 0.0, -coupling, 0.0, -coupling],
            [rho, 0.0, -1.0, 0.0, 0.0, 1.0],
            [0.0, rho, 0.0, -1.0, 1.0, 0.0],
            [rho, 0.0, 0.0, 1.0, -1.0, 0.0],
            [0.0, rho, 1.0, 0.0, 0.0, -1.0],
        ]
    )


GOLDSTONE_VECTOR = 0.5 * np.array([0.0, 0.0, 1.0, -1.0, -1.0, 1.0])
DARK_PHASE_VECTOR = 0.5 * np.array([0.0, 0.0, 1.0, 1.0, -1.0, -1.0])


@dataclass(frozen=True)
class GoldstoneCheck:
    goldstone_residual: float
    dark_residual: float
    eigenvalues: np.ndarray

    @property
    def remaining(self) -> np.ndarray:
        """Eigenvalues other than the 0 and -2 carried by the two signal-only vectors."""
        values = list(self.eigenvalues)
        for target in (0.0, -2.0):
            idx = int(np.argmin([abs(v - target) for v in values]))
            values.pop(idx)
        return np.array(values)

    @property
    def stable(self) -> bool:
        return bool(np.all(self.remaining.real < 0))


def goldstone_check(sigma: float, kappa: float, as_printed: bool = False) -> GoldstoneCheck:
    L = full_linear_matrix(sigma, kappa, as_printed=as_printed)
    return GoldstoneCheck(
        goldstone_residual=float(np.linalg.norm(L @ GOLDSTONE_VECTOR)),
        dark_residual=float(np.linalg.norm(L @ DARK_PHASE_VECTOR + 2.0 * DARK_PHASE_VECTOR)),
        eigenvalues=np.linalg.eigvals(L),
    )


__all__ = [
    "DARK_PHASE_VECTOR",
    "Eigensystem4",
    "GOLDSTONE_VECTOR",
    "GoldstoneCheck",
    "TrigCorrelations",
    "build_L",
    "diffusion_coefficient",
    "eigensystem",
    "full_linear_matrix",
    "goldstone_check",
    "orientation_variance",
    "projection_correlation",
    "projection_spectrum",
    "require_above_threshold",
    "wiener_trig_correlations",
]
