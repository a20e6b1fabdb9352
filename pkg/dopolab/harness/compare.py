"""Simulation against linearized theory: z-scores, fits and pass/fail verdicts."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

import numpy as np
import pandas as pd

from ..analytics.fixed_lo import fixed_lo_spectrum, fixed_lo_spectrum_composed
from ..analytics.spectra import DetectionConfig, SpectrumResult, dark_quadrature_spectrum
from ..errors import MinimizerError, ParameterMismatchError
from ..observables.spectrum import fit_dark_spectrum
from ..observables.stats import linear_fit
from ..params import DimensionlessParams
from .config import RunConfig
from .persistence import load_json, save_csv, save_json
from .runner import phi_label, spectral_plan

log = logging.getLogger(__name__)

PARAM_RTOL = 1e-12


@dataclass(frozen=True)
class Tolerances:
    z_max: float = 3.0
    slope_tol: float = 0.03
    r2_min: float = 0.99
    fit_low: float = 0.9
    fit_high: float = 1.1


@dataclass
class Check:
    name: str
    passed: bool
    value: Any = None
    detail: Dict[str, Any] = field(default_factory=dict)


@dataclass
class ComparisonReport:
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> None:
        level = logging.INFO if check.passed else logging.WARNING
        log.log(level, "[compare] %s: %s (%s)", check.name, "pass" if check.passed else "FAIL", check.value)
        self.checks.append(check)

    def as_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "checks": [asdict(c) for c in self.checks]}


def check_parameters(recorded: Mapping[str, Any], expected: DimensionlessParams) -> None:
    for key in ("sigma", "kappa", "g"):
        got = float(recorded[key])
        want = float(getattr(expected, key))
        if not math.isclose(got, want, rel_tol=PARAM_RTOL, abs_tol=0.0):
            raise ParameterMismatchError(f"{key}: simulation used {got!r}, prediction uses {want!r}")


def z_scores(simulated: SpectrumResult, predicted: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return (simulated.v_out - predicted) / simulated.err


def slope_check(times, variance, D: float, tol: Tolerances) -> Check:
    fit = linear_fit(times, np.asarray(variance) / D)
    ok = abs(fit.slope - 1.0) <= tol.slope_tol and fit.r_squared > tol.r2_min
    return Check("variance_slope", ok, fit.slope, fit._asdict())


def spectrum_check(name: str, simulated: SpectrumResult, predicted: np.ndarray, tol: Tolerances) -> Check:
    z = z_scores(simulated, predicted)
    finite = np.isfinite(z)
    worst = float(np.max(np.abs(z[finite]))) if finite.any() else float("nan")
    ok = bool(finite.any()) and worst < tol.z_max
    return Check(name, ok, worst, {"points": int(finite.sum())})


def dark_fit_check(simulated: SpectrumResult, tol: Tolerances) -> Check:
    try:
        fit = fit_dark_spectrum(simulated)
    except MinimizerError as exc:
        return Check("dark_phase_fit", False, None, {"error": str(exc)})
    ok = tol.fit_low <= fit.a <= tol.fit_high and tol.fit_low <= fit.b <= tol.fit_high
    return Check("dark_phase_fit", ok, [fit.a, fit.b], fit._asdict())


def predicted_spectrum(spec: SpectrumResult, params: DimensionlessParams, mode: str) -> np.ndarray:
    """Theory on the simulated grid: rotating dark mode or the fixed-LO composition."""
    phi = math.radians(float(spec.meta["phi_deg"]))
    if mode == "rotating":
        return np.asarray(dark_quadrature_spectrum(spec.omega, phi), dtype=float)
    config = DetectionConfig(phi=phi, T=float(spec.meta["T"]), mode="fixed")
    return np.asarray(fixed_lo_spectrum_composed(spec.omega, config, params.d, params.sigma), dtype=float)


def compare_run(run_dir, params: Optional[DimensionlessParams] = None, tol: Tolerances = Tolerances()) -> ComparisonReport:
    """Compare the files of a finished run with the linearized predictions and write compare.json."""
    out = Path(run_dir)
    manifest = load_json(out / "manifest.json")
    recorded = manifest["params"]
    if params is not None:
        check_parameters(recorded, params)
    params = DimensionlessParams(sigma=recorded["sigma"], kappa=recorded["kappa"], g=recorded["g"])
    mode = manifest["config"]["detection"]["mode"]
    report = ComparisonReport()

    variance = pd.read_csv(out / "variance.csv")
    if params.D and variance["var_theta"].notna().all():
        report.add(slope_check(variance["tau"], variance["var_theta"], params.D, tol))

    for phi_deg in manifest["config"]["detection"]["phi_deg"]:
        label = phi_label(phi_deg)
        path = out / f"spectrum_{mode}_phi{label}.csv"
        frame = pd.read_csv(path)
        meta = {"phi_deg": phi_deg}
        if mode == "fixed":
            meta["T"] = _window_length(manifest)
        spec = SpectrumResult(frame["omega"].to_numpy(), frame["v_out"].to_numpy(), frame["stderr"].to_numpy(), meta)
        theory = predicted_spectrum(spec, params, mode)
        report.add(spectrum_check(f"spectrum_{mode}_phi{label}", spec, theory, tol))
        table = frame.assign(v_theory=theory, z=z_scores(spec, theory))
        if mode == "fixed":
            config = DetectionConfig(phi=math.radians(phi_deg), T=meta["T"], mode="fixed")
            table["v_small_d"] = fixed_lo_spectrum(spec.omega, config, params.d, params.sigma)
        save_csv(out / f"compare_{mode}_phi{label}.csv", table)
        if mode == "rotating" and math.isclose(phi_deg, 90.0):
            report.add(dark_fit_check(spec, tol))

    save_json(out / "compare.json", report.as_dict())
    return report


def _window_length(manifest: Mapping[str, Any]) -> float:
    """Window actually used by the windowed estimator (a whole number of records)."""
    return spectral_plan(RunConfig.from_dict(manifest["config"])).duration


__all__ = [
    "Check",
    "ComparisonReport",
    "Tolerances",
    "check_parameters",
    "compare_run",
    "dark_fit_check",
    "predicted_spectrum",
    "slope_check",
    "spectrum_check",
    "z_scores",
]
