"""Classical steady states, stability and transverse-mode fields at the waist plane."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal, NamedTuple, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from .analytics.linear import full_linear_matrix
from .errors import BelowThresholdError, ParameterError

ModeKind = Literal["gauss", "lg+1", "lg-1", "hg10", "hg01"]
SteadyBranch = Literal["below", "above"]


@dataclass(frozen=True)
class SteadyState:
    beta0: complex
    beta_plus: complex
    beta_minus: complex
    theta: float
    branch: SteadyBranch

    def doubled(self) -> np.ndarray:
        """Lift to positive-P phase space with beta^+ = beta^*, ordering (b0, b0+, b+1, b+1+, b-1, b-1+)."""
        return np.array(
            [
                self.beta0,
                np.conj(self.beta0),
                self.beta_plus,
                np.conj(self.beta_plus),
                self.beta_minus,
                np.conj(self.beta_minus),
            ],
            dtype=complex,
        )


def steady_state(sigma: float, theta: float = 0.0) -> SteadyState:
    """Stable classical solution for pump level ``sigma``; ``theta`` is ignored below threshold."""
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma!r}")
    if sigma <= 1.0:
        return SteadyState(complex(sigma), 0j, 0j, 0.0, "below")
    rho = math.sqrt(sigma - 1.0)
    return SteadyState(
        beta0=1.0 + 0j,
        beta_plus=rho * cmath.exp(-1j * theta),
        beta_minus=rho * cmath.exp(1j * theta),
        theta=float(theta),
        branch="above",
    )


def residual(beta0: complex, beta_plus: complex, beta_minus: complex, sigma: float) -> np.ndarray:
    """Stationary classical equations; all three components vanish exactly at a fixed point."""
    return np.array(
        [
            beta0 - sigma + beta_plus * beta_minus,
            beta_plus - beta0 * np.conj(beta_minus),
            beta_minus - beta0 * np.conj(beta_plus),
        ],
        dtype=complex,
    )


def drift_jacobian(state: np.ndarray, sigma: float, kappa: float) -> np.ndarray:
    """Jacobian of the noise-free six-amplitude drift, ordering (b0, b0+, b+1, b+1+, b-1, b-1+).

    The drift is holomorphic in the doubled phase space, so the complex 6x6 matrix carries the
    full linear stability information.
    """
    b0, b0p, bp, bpp, bm, bmp = np.asarray(state, dtype=complex)
    J = np.zeros((6, 6), dtype=complex)
    J[0, 0] = -kappa
    J[0, 2] = -kappa * bm
    J[0, 4] = -kappa * bp
    J[1, 1] = -kappa
    J[1, 3] = -kappa * bmp
    J[1, 5] = -kappa * bpp
    J[2, 2] = -1.0
    J[2, 0] = bmp
    J[2, 5] = b0
    J[3, 3] = -1.0
    J[3, 1] = bm
    J[3, 4] = b0p
    J[4, 4] = -1.0
    J[4, 0] = bpp
    J[4, 3] = b0
    J[5, 5] = -1.0
    J[5, 1] = bp
    J[5, 2] = b0p
    return J


def stability_eigenvalues(sigma: float, kappa: float) -> np.ndarray:
    """Eigenvalues of the linearization about the stable branch for ``sigma``, sorted by real part.

    Below threshold the Jacobian is taken at (sigma, 0, 0); above it the fluctuation matrix of
    :func:`dopolab.analytics.linear.full_linear_matrix` is used (one zero eigenvalue).
    """
    if not kappa > 0:
        raise ParameterError(f"kappa must be positive, got {kappa!r}")
    state = steady_state(sigma)
    if state.branch == "below":
        matrix = drift_jacobian(state.doubled(), sigma, kappa)
    else:
        matrix = full_linear_matrix(sigma, kappa)
    eig = np.linalg.eigvals(matrix)
    return eig[np.argsort(-eig.real)]


# ---------------------------------------------------------------- transverse modes


@dataclass(frozen=True)
class TransverseMode:
    kind: ModeKind
    waist: float
    psi: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("gauss", "lg+1", "lg-1", "hg10", "hg01"):
            raise ParameterError(f"unknown mode kind {self.kind!r}")
        if not self.waist > 0:
            raise ParameterError(f"waist must be positive, got {self.waist!r}")


def _lg_modulus(r: np.ndarray, waist: float) -> np.ndarray:
    return 2.0 / math.sqrt(math.pi) * r / waist**2 * np.exp(-(r**2) / waist**2)


def mode_field(mode: TransverseMode, r, phi) -> np.ndarray:
    """Field amplitude (m^-1) of ``mode`` at polar coordinates (r, phi)."""
    r = np.asarray(r, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any(r < 0):
        raise ParameterError("r must be non-negative")
    w = mode.waist
    if mode.kind == "gauss":
        return (math.sqrt(2.0 / math.pi) / w * np.exp(-(r**2) / w**2)).astype(complex)
    modulus = _lg_modulus(r, w)
    if mode.kind == "lg+1":
        return modulus * np.exp(1j * phi)
    if mode.kind == "lg-1":
        return modulus * np.exp(-1j * phi)
    if mode.kind == "hg10":
        return (math.sqrt(2.0) * modulus * np.cos(phi - mode.psi)).astype(complex)
    return (math.sqrt(2.0) * modulus * np.sin(phi - mode.psi)).astype(complex)


def hg_fields_from_lg(l_plus, l_minus, psi: float) -> Tuple[np.ndarray, np.ndarray]:
    """(H10^psi, H01^psi) from the two Laguerre-Gauss fields."""
    l_plus = np.asarray(l_plus, dtype=complex)
    l_minus = np.asarray(l_minus, dtype=complex)
    rot = np.exp(-1j * psi)
    h10 = (rot * l_plus + np.conj(rot) * l_minus) / math.sqrt(2.0)
    h01 = (rot * l_plus - np.conj(rot) * l_minus) / (math.sqrt(2.0) * 1j)
    return h10, h01


def lg_fields_from_hg(h10, h01, psi: float) -> Tuple[np.ndarray, np.ndarray]:
    h10 = np.asarray(h10, dtype=complex)
    h01 = np.asarray(h01, dtype=complex)
    l_plus = np.exp(1j * psi) * (h10 + 1j * h01) / math.sqrt(2.0)
    l_minus = np.exp(-1j * psi) * (h10 - 1j * h01) / math.sqrt(2.0)
    return l_plus, l_minus


def hg_amplitudes_from_lg(a_plus, a_minus, psi: float) -> Tuple[np.ndarray, np.ndarray]:
    """Mode amplitudes (a_10, a_01) rotated by ``psi`` from the OAM amplitudes."""
    a_plus = np.asarray(a_plus, dtype=complex)
    a_minus = np.asarray(a_minus, dtype=complex)
    a10 = (np.exp(1j * psi) * a_plus + np.exp(-1j * psi) * a_minus) / math.sqrt(2.0)
    a01 = 1j * (np.exp(1j * psi) * a_plus - np.exp(-1j * psi) * a_minus) / math.sqrt(2.0)
    return a10, a01


def lg_amplitudes_from_hg(a10, a01, psi: float) -> Tuple[np.ndarray, np.ndarray]:
    a10 = np.asarray(a10, dtype=complex)
    a01 = np.asarray(a01, dtype=complex)
    a_plus = np.exp(-1j * psi) * (a10 - 1j * a01) / math.sqrt(2.0)
    a_minus = np.exp(1j * psi) * (a10 + 1j * a01) / math.sqrt(2.0)
    return a_plus, a_minus


class SampleGrid(NamedTuple):
    x: np.ndarray
    y: np.ndarray
    r: np.ndarray
    phi: np.ndarray


def cartesian_grid(waist: float, n: int = 128, extent: float = 3.0) -> SampleGrid:
    """n x n Cartesian grid covering +-extent*waist, with polar coordinates attached."""
    if n < 2:
        raise ParameterError("grid needs at least 2 points per axis")
    axis = np.linspace(-extent * waist, extent * waist, n)
    x, y = np.meshgrid(axis, axis, indexing="xy")
    return SampleGrid(x=x, y=y, r=np.hypot(x, y), phi=np.arctan2(y, x))


def norm_squared(field: np.ndarray, grid: SampleGrid) -> float:
    """Tensor-product trapezoid estimate of the L2 norm squared of ``field`` on ``grid``."""
    density = np.abs(field) ** 2
    return float(trapezoid(trapezoid(density, grid.x[0], axis=1), grid.y[:, 0]))


def overlap(first: np.ndarray, second: np.ndarray, grid: SampleGrid) -> complex:
    integrand = np.conj(first) * second
    return complex(trapezoid(trapezoid(integrand, grid.x[0], axis=1), grid.y[:, 0]))


def bright_pattern(sigma: float, theta: float, grid: SampleGrid, waist: float) -> np.ndarray:
    """Classical signal envelope sqrt(2) rho H10^theta sampled on ``grid``."""
    if sigma <= 1.0:
        raise BelowThresholdError(f"no bright pattern below threshold (sigma={sigma})")
    rho = math.sqrt(sigma - 1.0)
    mode = TransverseMode("hg10", waist=waist, psi=theta)
    return math.sqrt(2.0) * rho * mode_field(mode, grid.r, grid.phi)


def pattern_frame(field: np.ndarray, grid: SampleGrid) -> pd.DataFrame:
    """Flatten a sampled field into (x, y, re, im) rows for CSV emission."""
    return pd.DataFrame(
        {
            "x": grid.x.ravel(),
            "y": grid.y.ravel(),
            "re": np.real(field).ravel(),
            "im": np.imag(field).ravel(),
        }
    )


__all__ = [
    "SampleGrid",
    "SteadyState",
    "TransverseMode",
    "bright_pattern",
    "cartesian_grid",
    "drift_jacobian",
    "hg_amplitudes_from_lg",
    "hg_fields_from_lg",
    "lg_amplitudes_from_hg",
    "lg_fields_from_hg",
    "mode_field",
    "norm_squared",
    "overlap",
    "pattern_frame",
    "residual",
    "stability_eigenvalues",
    "steady_state",
]
