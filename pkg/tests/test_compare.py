import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from dopolab.analytics.fixed_lo import fixed_lo_spectrum_composed
from dopolab.analytics.spectra import DetectionConfig, SpectrumResult, dark_quadrature_spectrum
from dopolab.errors import ParameterMismatchError
from dopolab.harness.compare import (
    Tolerances,
    compare_run,
    dark_fit_check,
    slope_check,
    spectrum_check,
)
from dopolab.harness.config import RunConfig, load_config
from dopolab.harness.persistence import load_json, save_csv, save_json
from dopolab.harness.runner import phi_label, spectral_plan
from dopolab.params import DimensionlessParams

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
ERR = 0.01


def _fake_run(out: Path, config: RunConfig, spectrum) -> None:
    """Run directory whose files carry the closed-form values with uniform error bars."""
    params = config.params
    tau = config.integrator.record_times()
    D = params.D
    save_csv(out / "variance.csv", pd.DataFrame({"tau": tau, "var_theta": D * tau, "stderr": np.full(tau.size, 1e-3 * D)}))
    mode = config.detection.mode
    for phi_deg in config.detection.phi_deg:
        omega, v = spectrum(phi_deg)
        frame = pd.DataFrame({"omega": omega, "v_out": v, "stderr": np.full(omega.size, ERR)})
        save_csv(out / f"spectrum_{mode}_phi{phi_label(phi_deg)}.csv", frame)
    save_json(out / "manifest.json", {"config": config.to_dict(), "params": params.as_dict(), "outputs": {}})


def test_rotating_run_matching_theory_passes(tmp_path):
    config = RunConfig.from_dict({"ensemble": {"master_seed": 1}})
    omega = config.detection.omega.values()
    _fake_run(tmp_path, config, lambda p: (omega, dark_quadrature_spectrum(omega, math.radians(p)) + 0.5 * ERR))
    report = compare_run(tmp_path)
    names = [c.name for c in report.checks]
    assert names == ["variance_slope", "spectrum_rotating_phi0", "spectrum_rotating_phi90", "dark_phase_fit"]
    assert report.passed
    saved = load_json(tmp_path / "compare.json")
    assert saved["passed"] is True
    table = pd.read_csv(tmp_path / "compare_rotating_phi90.csv")
    assert np.allclose(table["z"], 0.5)


def test_fixed_run_uses_the_composed_prediction(tmp_path):
    config = load_config(CONFIGS / "fixed_lo.yml").with_overrides({"detection.omega": "0:1:3", "detection.phi_deg": [90.0]})
    params = config.params
    T = spectral_plan(config).duration

    def theory(phi_deg):
        omega = config.detection.omega.values()
        det = DetectionConfig(phi=math.radians(phi_deg), T=T, mode="fixed")
        return omega, fixed_lo_spectrum_composed(omega, det, params.d, params.sigma)

    _fake_run(tmp_path, config, theory)
    report = compare_run(tmp_path)
    assert report.passed
    table = pd.read_csv(tmp_path / "compare_fixed_phi90.csv")
    assert {"v_theory", "z", "v_small_d"} <= set(table.columns)
    assert "dark_phase_fit" not in [c.name for c in report.checks]


def test_parameter_mismatch_is_an_error(tmp_path):
    config = RunConfig.from_dict({"ensemble": {"master_seed": 1}})
    omega = config.detection.omega.values()
    _fake_run(tmp_path, config, lambda p: (omega, dark_quadrature_spectrum(omega, math.radians(p))))
    with pytest.raises(ParameterMismatchError):
        compare_run(tmp_path, params=DimensionlessParams(sigma=1.5, kappa=1.0, g=1e-3))


def test_spectrum_check_flags_outliers():
    omega = np.linspace(0.0, 5.0, 11)
    theory = dark_quadrature_spectrum(omega, math.pi / 2)
    tol = Tolerances()
    close = SpectrumResult(omega, theory + 2.0 * ERR, np.full(11, ERR))
    far = SpectrumResult(omega, theory + 4.0 * ERR, np.full(11, ERR))
    assert spectrum_check("near", close, theory, tol).passed
    assert not spectrum_check("far", far, theory, tol).passed
    empty = SpectrumResult(omega, theory, np.full(11, np.nan))
    assert not spectrum_check("nan", empty, theory, tol).passed


def test_slope_check():
    tau = np.linspace(0.0, 30.0, 31)
    tol = Tolerances()
    assert slope_check(tau, 2e-7 * tau, 2e-7, tol).passed
    assert not slope_check(tau, 2.2e-7 * tau, 2e-7, tol).passed


def test_dark_fit_check_reports_level_and_corner():
    omega = np.linspace(0.25, 10.0, 40)
    result = SpectrumResult(omega, dark_quadrature_spectrum(omega, math.pi / 2), np.full(40, ERR))
    check = dark_fit_check(result, Tolerances())
    assert check.passed
    assert check.value == pytest.approx([1.0, 1.0], rel=1e-6)
