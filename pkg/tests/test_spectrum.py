import math

import numpy as np
import pytest

from dopolab.analytics.spectra import SpectrumResult, fit_function
from dopolab.errors import InsufficientDataError
from dopolab.observables.spectrum import (
    SpectralAccumulator,
    dip_model,
    fit_dark_spectrum,
    post_cutoff,
    stationary_bins,
    stationary_spectrum,
    window_slice,
    windowed_spectrum,
    windowed_transforms,
)

DT = 0.05
RATE = 1.0
LEVEL = 0.25


def _ou_ensemble(n_samples=1025, n=400, seed=4):
    """Exact discretization of a stationary process with correlation LEVEL * exp(-RATE |t|)."""
    rng = np.random.default_rng(seed)
    a = math.exp(-RATE * DT)
    x = np.empty((n_samples, n))
    x[0] = rng.normal(scale=math.sqrt(LEVEL), size=n)
    kicks = rng.normal(scale=math.sqrt(LEVEL * (1.0 - a * a)), size=(n_samples - 1, n))
    for k in range(1, n_samples):
        x[k] = a * x[k - 1] + kicks[k - 1]
    return np.arange(n_samples) * DT, x


@pytest.fixture(scope="module")
def ensemble():
    return _ou_ensemble()


def test_stationary_estimate_follows_lorentzian(ensemble):
    times, x = ensemble
    result = stationary_spectrum(x, times, cutoff=0.0, g=1.0, omega_max=3.0)
    expected = 1.0 + 2.0 * (2.0 * LEVEL * RATE / (RATE ** 2 + result.omega ** 2))
    assert result.has_errors
    assert result.meta["trajectories"] == 400
    assert np.all(np.abs(result.v_out - expected) < 5.0 * result.err + 0.05)


def test_windowed_estimator_agrees_with_fft_bins(ensemble):
    times, x = ensemble
    stationary = stationary_spectrum(x, times, cutoff=0.0, g=1.0, omega_max=2.0)
    windowed = windowed_spectrum(x, times, stationary.omega, T=1024 * DT, g=1.0, t0=DT)
    np.testing.assert_allclose(windowed.v_out, stationary.v_out, rtol=1e-9)
    assert windowed.meta["estimator"] == "windowed"


def test_vacuum_for_a_constant_quadrature():
    times = np.arange(64) * 0.1
    X = np.ones((64, 10)) * (1.0 + 2.0j)
    result = windowed_spectrum(X, times, [0.0, 1.0], T=3.2, g=0.5, n_groups=5)
    assert np.allclose(result.v_out, 1.0)


def test_complex_quadratures_use_the_unconjugated_product():
    times = np.arange(32) * 0.1
    rng = np.random.default_rng(8)
    # purely imaginary fluctuations carry negative normally ordered noise
    X = 1j * rng.normal(size=(32, 200))
    result = windowed_spectrum(X, times, [0.0], T=3.2, g=1.0, n_groups=4)
    assert result.v_out[0] < 1.0


def test_accumulators_merge_exactly():
    times = np.arange(40) * 0.1
    X = np.random.default_rng(5).normal(size=(40, 24))
    omega = np.array([0.0, 0.5, 1.5])
    a_pos, a_neg = windowed_transforms(X, 0.1, omega)
    groups = np.arange(24) % 4
    whole = SpectralAccumulator(omega, 4.0, n_groups=4)
    whole.add(a_pos, a_neg, groups)
    merged = SpectralAccumulator(omega, 4.0, n_groups=4)
    for sl in (slice(12, 24), slice(0, 12)):
        part = SpectralAccumulator(omega, 4.0, n_groups=4)
        part.add(a_pos[:, sl], a_neg[:, sl], groups[sl])
        merged.merge(part)
    np.testing.assert_allclose(merged.result(0.3).v_out, whole.result(0.3).v_out)
    np.testing.assert_allclose(merged.result(0.3).err, whole.result(0.3).err)


def test_insufficient_data():
    acc = SpectralAccumulator([0.0], 1.0, n_groups=2)
    with pytest.raises(InsufficientDataError):
        acc.result(1.0)
    assert np.isnan(acc.result(1.0, strict=False).v_out[0])
    times = np.arange(20) * 0.1
    with pytest.raises(InsufficientDataError):
        stationary_spectrum(np.zeros((20, 4)), times, cutoff=1.5, g=1.0)
    with pytest.raises(InsufficientDataError):
        window_slice(times, 1.0, 5.0)


def test_window_helpers():
    times = np.arange(11) * 0.5
    assert window_slice(times, 1.0, 2.0) == slice(2, 6)
    assert post_cutoff(times, 1.0) == slice(3, 11)
    bins, omega = stationary_bins(8, 0.5, omega_max=3.5)
    assert list(bins) == [0, 1, 2]
    assert omega[1] == pytest.approx(2.0 * math.pi / 4.0)


def test_dip_fit_recovers_level_and_corner():
    omega = np.linspace(0.05, 10.0, 120)
    result = SpectrumResult(omega, dip_model(omega, 0.95, 1.1))
    fit = fit_dark_spectrum(result)
    assert fit.a == pytest.approx(0.95, rel=1e-6)
    assert fit.b == pytest.approx(1.1, rel=1e-6)


def test_dip_model_agrees_with_fit_function_at_unity():
    omega = np.linspace(0.0, 6.0, 13)
    assert np.allclose(dip_model(omega, 1.0, 1.0), fit_function(omega, 1.0, 1.0))
