"""Classical Poisson brackets of the dark-mode quadratures and the pattern orientation.

Brackets are evaluated from the definition

    {f, h} = (1/i) sum_m (df/dbeta_m dh/dbeta_m* - df/dbeta_m* dh/dbeta_m)

with Wirtinger derivatives taken by central differences, so no closed form is trusted.
"""

from __future__ import annotations

import cmath
import math
from typing import Callable, NamedTuple, Sequence, Tuple

import numpy as np

from ..errors import OrientationUndefinedError

PhaseFunction = Callable[[np.ndarray], complex]

STEP = 1e-6


def _wirtinger(func: PhaseFunction, z: np.ndarray, k: int, step: float) -> Tuple[complex, complex]:
    """(df/dz_k, df/dz_k*) by central differences along Re z_k and Im z_k."""
    h = step * max(1.0, abs(z[k]))
    e = np.zeros_like(z)
    e[k] = h
    d_re = (func(z + e) - func(z - e)) / (2.0 * h)
    d_im = (func(z + 1j * e) - func(z - 1j * e)) / (2.0 * h)
    return 0.5 * (d_re - 1j * d_im), 0.5 * (d_re + 1j * d_im)


def poisson_bracket(f: PhaseFunction, h: PhaseFunction, amplitudes: Sequence[complex], step: float = STEP) -> complex:
    z = np.asarray(amplitudes, dtype=complex)
    total = 0j
    for k in range(z.size):
        df, df_conj = _wirtinger(f, z, k, step)
        dh, dh_conj = _wirtinger(h, z, k, step)
        total += df * dh_conj - df_conj * dh
    return total / 1j


def single_mode_quadratures() -> Tuple[PhaseFunction, PhaseFunction]:
    """X = beta + beta*, Y = -i(beta - beta*) for a single amplitude."""
    return (
        lambda z: z[0] + np.conj(z[0]),
        lambda z: -1j * (z[0] - np.conj(z[0])),
    )


def orientation(z: np.ndarray) -> float:
    """theta = (1/2) arg(beta+1* beta-1) for classical amplitudes (beta+1, beta-1)."""
    bp, bm = z[0], z[1]
    if bp == 0 or bm == 0:
        raise OrientationUndefinedError("orientation undefined for a vanishing OAM amplitude")
    return 0.5 * cmath.phase(np.conj(bp) * bm)


def dark_quadrature_classical(phi: float) -> PhaseFunction:
    """X_d^phi as a function of (beta+1, beta-1), with theta following the amplitudes."""

    def quadrature(z: np.ndarray) -> complex:
        theta = orientation(z)
        inner = cmath.exp(-1j * phi) * (cmath.exp(1j * theta) * z[0] - cmath.exp(-1j * theta) * z[1])
        value = 1j / math.sqrt(2.0) * inner
        return value + np.conj(value)

    return quadrature


class BracketResult(NamedTuple):
    xx: complex
    x_theta: complex


def poisson_brackets(beta_plus: complex, beta_minus: complex, phi: float) -> BracketResult:
    """{X_d^phi, X_d^{phi+pi/2}} and {X_d^phi, theta} at the given OAM amplitudes."""
    if beta_plus == 0 or beta_minus == 0:
        raise OrientationUndefinedError("brackets need both OAM amplitudes non-zero")
    z = np.array([beta_plus, beta_minus], dtype=complex)
    x_phi = dark_quadrature_classical(phi)
    x_orth = dark_quadrature_classical(phi + math.pi / 2)
    xx = poisson_bracket(x_phi, x_orth, z)
    x_theta = poisson_bracket(x_phi, lambda v: complex(orientation(v)), z)
    return BracketResult(xx=xx, x_theta=x_theta)


def reference_brackets(beta_plus: complex, beta_minus: complex, phi: float) -> BracketResult:
    """Closed forms of the two brackets in terms of |beta+1| and |beta-1|.

    The second factor of {X, theta} is taken as e^{i phi}|beta-1| - e^{-i phi}|beta+1|; both
    forms reduce to -sin(phi)/(sqrt(2) rho) at equal moduli rho.
    """
    a = abs(beta_plus)
    b = abs(beta_minus)
    if a == 0 or b == 0:
        raise OrientationUndefinedError("brackets need both OAM amplitudes non-zero")
    xx = (b - a) / (2.0 * a * b)
    numerator = 1j * (a + b) * (cmath.exp(1j * phi) * b - cmath.exp(-1j * phi) * a)
    x_theta = numerator / (4.0 * math.sqrt(2.0) * (a * b) ** 1.5)
    return BracketResult(xx=complex(xx), x_theta=x_theta)


__all__ = [
    "BracketResult",
    "dark_quadrature_classical",
    "orientation",
    "poisson_bracket",
    "poisson_brackets",
    "reference_brackets",
    "single_mode_quadratures",
]
