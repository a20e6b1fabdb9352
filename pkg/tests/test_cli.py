import json
import math

import pytest
from click.testing import CliRunner

import dopolab.cli as cli_module
from dopolab import __version__
from dopolab.cli import cli
from dopolab.errors import DivergenceThresholdExceeded
from dopolab.harness.validate import ValidationReport

SMALL_RUN = [
    "--set", "integrator.tau_end=1.2",
    "--set", "ensemble.stationary_cutoff=0.5",
    "--set", "ensemble.block_size=3",
    "--set", "ensemble.n_groups=4",
    "--trajectories", "48",
]


@pytest.fixture
def runner():
    return CliRunner()


def _invoke(runner, *args):
    return runner.invoke(cli, ["--log-level", "ERROR", *args], catch_exceptions=False)


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_params_reports_dimensionless_set(runner):
    result = _invoke(runner, "params")
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report["dimensionless"]["sigma"] == pytest.approx(math.sqrt(2.0))
    assert "rates" not in report


def test_classical_steady_state(runner, tmp_path):
    out = tmp_path / "pattern.csv"
    result = _invoke(runner, "classical", "--theta", "0.2", "--grid", "8", "--out", str(out))
    assert result.exit_code == 0
    assert out.exists()
    payload = json.loads(result.output.split("wrote")[0])
    assert payload["branch"] == "above"
    # classical solutions have beta_-1 = conj(beta_+1)
    assert payload["beta_minus"]["re"] == pytest.approx(payload["beta_plus"]["re"])
    assert payload["beta_minus"]["im"] == pytest.approx(-payload["beta_plus"]["im"])


def test_analytic_prints_spectra(runner):
    result = _invoke(runner, "analytic", "--omega", "0:2:3", "--phi-deg", "45")
    assert result.exit_code == 0
    assert result.output.startswith("D = ")
    assert "X_dark_phi45" in result.output


def test_fixed_lo_writes_table(runner, tmp_path):
    out = tmp_path / "fixed.csv"
    result = _invoke(runner, "fixed-lo", "--d", "1e-10", "--omega", "0:1:5", "--composed", "--out", str(out))
    assert result.exit_code == 0
    assert "T_opt" in result.output
    assert out.read_text().splitlines()[0] == "omega,v_out,v_out_db,v_composed"


def test_sweep_over_phase(runner):
    result = _invoke(runner, "sweep", "--axis", "phi", "--grid", "88:90:3")
    assert result.exit_code == 0
    assert "phi_deg" in result.output


def test_sweep_needs_an_axis(runner):
    result = runner.invoke(cli, ["sweep"])
    assert result.exit_code == 2


def test_simulate_requires_a_seed(runner):
    result = runner.invoke(cli, ["simulate"])
    assert result.exit_code == 2
    assert "--seed" in result.output


def test_bad_override_is_a_usage_failure(runner, tmp_path):
    result = runner.invoke(cli, ["simulate", "--seed", "1", "--set", "ensemble.trajectories=0", "--out", str(tmp_path)])
    assert result.exit_code == 1
    assert "trajectories" in result.output


def test_simulate_spectrum_compare_and_rerun(runner, tmp_path):
    run_dir = tmp_path / "run"
    result = _invoke(runner, "simulate", "--seed", "11", *SMALL_RUN, "--out", str(run_dir))
    assert result.exit_code == 0, result.output
    assert (run_dir / "manifest.json").exists()

    result = _invoke(runner, "spectrum", str(run_dir), "--db")
    assert result.exit_code == 0
    assert "rotating phi = 90 deg" in result.output

    result = _invoke(runner, "compare", str(run_dir))
    assert result.exit_code in (0, 2)
    assert "variance_slope" in result.output

    rerun = tmp_path / "rerun"
    result = _invoke(runner, "simulate", "--manifest", str(run_dir / "manifest.json"), "--out", str(rerun))
    assert result.exit_code == 0
    assert "digests reproduced: True" in result.output


def test_divergence_budget_exits_with_code_3(runner, tmp_path, monkeypatch):
    def explode(*args, **kwargs):
        raise DivergenceThresholdExceeded(0.5, 1e-3)

    monkeypatch.setattr(cli_module, "run_ensemble", explode)
    result = runner.invoke(cli, ["simulate", "--seed", "1", "--out", str(tmp_path)])
    assert result.exit_code == 3
    assert "exceeds threshold" in result.output


def test_failed_validation_exits_with_code_2(runner, tmp_path, monkeypatch):
    def failing(out_dir, **kwargs):
        report = ValidationReport()
        report.checks.append({"criterion": 6, "name": "noise_statistics", "value": 9.0, "passed": False})
        return report

    monkeypatch.setattr(cli_module, "validate", failing)
    result = runner.invoke(cli, ["validate", "--out", str(tmp_path)])
    assert result.exit_code == 2
    assert "FAIL  [6] noise_statistics" in result.output
