import logging
import math

import numpy as np
import pytest

from dopolab.classical import steady_state
from dopolab.errors import ConfigError
from dopolab.params import DimensionlessParams
from dopolab.sde import (
    FieldState,
    GeometricNoise,
    IntegratorConfig,
    NoiseStream,
    OrnsteinUhlenbeck,
    endpoint_ensemble,
    integrate_ensemble,
    integrate_trajectory,
    make_system,
)

PARAMS = DimensionlessParams(sigma=math.sqrt(2.0), kappa=1.0, g=0.1)


class CountingObserver:
    def start(self, n_records, n_trajectories):
        self.n_records = n_records
        self.times = []

    def record(self, k, tau, state):
        self.times.append(tau)


def test_config_geometry():
    config = IntegratorConfig(dt=0.01, tau_end=2.0, record_every=5)
    assert config.n_steps == 200
    assert config.n_records == 41
    assert config.record_dt == pytest.approx(0.05)
    assert config.record_times()[-1] == pytest.approx(2.0)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"dt": 0.0},
        {"tau_end": -1.0},
        {"midpoint_iterations": 0},
        {"dt": 0.01, "tau_end": 1.005},
        {"dt": 0.01, "tau_end": 1.0, "record_every": 3},
    ],
)
def test_config_rejects_inconsistent_grids(kwargs):
    with pytest.raises(ConfigError):
        IntegratorConfig(**kwargs)


def test_ou_reaches_stationary_power():
    system = OrnsteinUhlenbeck(rate=1.0, gamma=1.0)
    y = endpoint_ensemble(system, 0.0, dt=0.01, n_steps=500, master_seed=3, n=4000)
    assert np.mean(np.abs(y[0]) ** 2) == pytest.approx(system.stationary_power, abs=0.04)


def test_midpoint_scheme_converges_to_stratonovich():
    system = GeometricNoise(a=0.0, s=1.0)
    strat = endpoint_ensemble(system, 1.0, dt=0.01, n_steps=100, master_seed=9, n=4000)
    ito = endpoint_ensemble(system, 1.0, dt=0.01, n_steps=100, master_seed=9, n=4000, scheme="ito")
    assert np.mean(strat.real) == pytest.approx(system.mean(1.0), abs=0.17)
    assert np.mean(ito.real) == pytest.approx(system.mean(1.0, "ito"), abs=0.1)
    assert np.mean(strat.real) - np.mean(ito.real) > 0.4


def test_endpoint_ensemble_rejects_unknown_scheme():
    with pytest.raises(ConfigError):
        endpoint_ensemble(OrnsteinUhlenbeck(), 0.0, 0.01, 1, 0, 2, scheme="milstein")


def test_full_system_keeps_conjugate_symmetry():
    system = make_system("full", PARAMS)
    config = IntegratorConfig(dt=0.01, tau_end=1.0, system="full", record_every=10)
    y0 = system.initial(steady_state(PARAMS.sigma, 0.5), 8)
    run = integrate_ensemble(system, y0, config, NoiseStream(17, np.arange(8), config.dt))
    y = run.final
    assert run.n_diverged == 0
    assert np.max(np.abs(y[4] - np.conj(y[2]))) < 1e-10
    assert np.max(np.abs(y[5] - np.conj(y[3]))) < 1e-10
    assert np.max(np.abs(y[0].imag)) < 1e-10


def test_observers_see_every_record():
    system = make_system("reduced", PARAMS)
    config = IntegratorConfig(dt=0.01, tau_end=0.5, record_every=10)
    observer = CountingObserver()
    integrate_ensemble(
        system, system.initial(steady_state(PARAMS.sigma), 2), config, NoiseStream(1, [0, 1], config.dt), [observer]
    )
    assert observer.n_records == config.n_records
    assert np.allclose(observer.times, config.record_times())


def test_divergent_trajectories_are_frozen(caplog):
    system = GeometricNoise(a=50.0, s=0.0)
    config = IntegratorConfig(dt=0.01, tau_end=1.0, record_every=1)
    with caplog.at_level(logging.WARNING):
        run = integrate_ensemble(system, np.ones((1, 3), dtype=complex), config, NoiseStream(2, [0, 1, 2], config.dt))
    assert run.n_diverged == 3
    assert np.all(run.diverged_step > 0)
    assert np.all(np.isfinite(run.final))
    assert np.all(np.abs(run.final) <= 1e6)
    assert "diverged" in caplog.text


def test_initial_state_shape_is_checked():
    system = make_system("reduced", PARAMS)
    config = IntegratorConfig(dt=0.01, tau_end=0.1)
    with pytest.raises(ConfigError):
        integrate_ensemble(system, np.zeros((6, 2), dtype=complex), config, NoiseStream(0, [0, 1], config.dt))
    with pytest.raises(ConfigError):
        integrate_ensemble(system, np.zeros((4, 2), dtype=complex), config, NoiseStream(0, [0], config.dt))


def test_single_trajectory_matches_its_ensemble_column():
    steady = steady_state(PARAMS.sigma)
    config = IntegratorConfig(dt=0.01, tau_end=0.5, system="reduced", record_every=10)
    first = integrate_trajectory(FieldState.from_steady(steady), config, PARAMS, master_seed=5, index=1)
    again = integrate_trajectory(FieldState.from_steady(steady), config, PARAMS, master_seed=5, index=1)
    assert first.status == "ok"
    assert np.array_equal(first.final.as_array(), again.final.as_array())

    system = make_system("reduced", PARAMS)
    run = integrate_ensemble(system, system.initial(steady, 3), config, NoiseStream(5, [0, 1, 2], config.dt))
    np.testing.assert_allclose(system.expand(run.final)[:, 1], first.final.as_array(), rtol=1e-13, atol=1e-15)
