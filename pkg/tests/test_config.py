import math
from pathlib import Path

import pytest

from dopolab.errors import ConfigError
from dopolab.harness.config import OmegaGrid, RunConfig, load_config

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def test_desk_config_loads():
    config = load_config(CONFIGS / "desk.yml")
    assert config.integrator.record_every == 10
    assert config.integrator.n_steps == 10000
    assert config.ensemble.master_seed == 1234
    assert config.detection.phis == pytest.approx((0.0, math.pi / 2))
    assert config.params.d == pytest.approx(2.5e-7)


def test_fixed_lo_config_uses_optimal_window():
    config = load_config(CONFIGS / "fixed_lo.yml")
    assert config.detection.T is None
    assert config.detection_time == pytest.approx(52.55, rel=1e-3)


def test_dict_round_trip():
    config = load_config(CONFIGS / "fixed_lo.yml")
    assert RunConfig.from_dict(config.to_dict()) == config


def test_overrides_reparse_values():
    config = load_config(CONFIGS / "desk.yml").with_overrides(
        {"ensemble.trajectories": 64, "ensemble.workers": None, "detection.omega": "0:2:5"}
    )
    assert config.ensemble.trajectories == 64
    assert config.ensemble.workers == 4
    assert config.detection.omega == OmegaGrid(0.0, 2.0, 5)
    with pytest.raises(ConfigError):
        config.with_overrides({"trajectories": 5})


@pytest.mark.parametrize(
    "raw",
    [
        {"simulation": {}},
        {"ensemble": {"trajectorys": 10}},
        {"ensemble": {"trajectories": 0}},
        {"ensemble": {"n_groups": 1}},
        {"detection": {"mode": "lab"}},
        {"detection": {"omega": "0:1"}},
        {"integrator": {"dt": 0.01, "tau_end": 5.0}, "ensemble": {"stationary_cutoff": 5.0}},
        {"integrator": {"dt": 0.01, "tau_end": 20.0}, "detection": {"mode": "fixed", "T": 15.0, "t0": 10.0}},
        {"model": {"sigma": 0.8}, "detection": {"mode": "fixed", "T": 5.0, "t0": 1.0}},
        {"model": {"g": -1.0}},
    ],
)
def test_bad_configs_raise_config_error(raw):
    with pytest.raises(ConfigError):
        RunConfig.from_dict(raw)


def test_physical_section_replaces_model():
    config = RunConfig.from_dict({"physical": {"T_p": 0.1, "T_s": 0.01}})
    assert config.params.kappa == pytest.approx(10.0)
