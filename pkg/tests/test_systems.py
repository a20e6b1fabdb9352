import math

import numpy as np
import pytest

from dopolab.classical import steady_state
from dopolab.errors import ConfigError
from dopolab.params import DimensionlessParams
from dopolab.sde.systems import (
    AdiabaticSystem,
    BranchMonitor,
    FieldState,
    FullSystem,
    ReducedSystem,
    drift_full,
    make_system,
    principal_sqrt,
)

PARAMS = DimensionlessParams(sigma=math.sqrt(2.0), kappa=1.0, g=1e-3)


def _random_reduced(n=5, seed=0):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(4, n)) + 1j * rng.normal(size=(4, n))


def test_full_drift_vanishes_at_steady_state():
    system = FullSystem(PARAMS)
    y = system.initial(steady_state(PARAMS.sigma, 0.3), 4)
    assert y.shape == (6, 4)
    assert np.max(np.abs(system.drift(y))) < 1e-12


def test_adiabatic_drift_only_carries_the_loss_correction():
    system = AdiabaticSystem(PARAMS)
    y = system.initial(steady_state(PARAMS.sigma, 0.3), 2)
    assert np.max(np.abs(system.drift(y))) < PARAMS.g ** 2


def test_reduced_equations_follow_the_full_ones():
    y = _random_reduced()
    full = FullSystem(PARAMS)
    reduced = ReducedSystem(PARAMS)
    expanded = reduced.expand(y)
    assert np.allclose(reduced.drift(y), full.drift(expanded)[:4])
    W = np.full(5, 0.1 + 0.2j)
    W_plus = np.full(5, -0.3j)
    assert np.allclose(reduced.noise(y, W, W_plus), full.noise(expanded, W, W_plus)[:4])


def test_adiabatic_expand_slaves_the_pump():
    system = AdiabaticSystem(PARAMS)
    y = _random_reduced(3, seed=1)
    full = system.expand(y)
    assert full.shape == (6, 3)
    assert np.allclose(full[0], PARAMS.sigma - y[0] * y[2])
    assert np.allclose(full[1], PARAMS.sigma - y[1] * y[3])
    assert np.allclose(full[2:], y)


def test_full_noise_couples_conjugate_increments():
    system = FullSystem(PARAMS)
    y = system.initial(steady_state(PARAMS.sigma), 1)
    W = np.array([0.3 - 0.1j])
    B = system.noise(y, W, np.array([0.2j]))
    assert np.all(B[:2] == 0)
    assert B[4, 0] == pytest.approx(np.conj(B[2, 0]))


def test_make_system():
    assert isinstance(make_system("reduced", PARAMS), ReducedSystem)
    assert make_system("adiabatic", PARAMS).n_components == 4
    with pytest.raises(ConfigError):
        make_system("wigner", PARAMS)


def test_principal_sqrt_branch():
    assert complex(principal_sqrt(-1.0)) == pytest.approx(1j)
    assert complex(principal_sqrt(4.0 + 0j)) == pytest.approx(2.0)


def test_branch_monitor_counts_crossings():
    monitor = BranchMonitor()
    monitor.update(np.array([-1.0 + 0.1j, 1.0 + 0.1j]))
    monitor.update(np.array([-1.0 - 0.1j, 1.0 - 0.1j]))
    assert monitor.crossings == 1


def test_field_state_round_trip():
    y = FullSystem(PARAMS).initial(steady_state(PARAMS.sigma, 0.2), 3)
    state = FieldState.from_array(y)
    assert np.array_equal(state.as_array(), y)
    assert np.max(np.abs(drift_full(state, PARAMS).as_array())) < 1e-12
