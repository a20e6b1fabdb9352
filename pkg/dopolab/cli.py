import functools
import json
import logging
import math
from pathlib import Path
from typing import Dict, Iterable, Optional

import click
import numpy as np
import pandas as pd
import yaml

from dopolab import __version__
from dopolab.analytics.fixed_lo import (
    fixed_lo_spectrum,
    fixed_lo_spectrum_composed,
    optimal_detection_time,
    optimal_noise_frequency,
)
from dopolab.analytics.linear import diffusion_coefficient
from dopolab.analytics.spectra import DetectionConfig, SpectrumResult, bright_dark_spectra, dark_quadrature_spectrum, to_db
from dopolab.classical import bright_pattern, cartesian_grid, pattern_frame, stability_eigenvalues, steady_state
from dopolab.errors import DivergenceThresholdExceeded, DopoError, MinimizerError
from dopolab.harness.compare import compare_run
from dopolab.harness.config import OmegaGrid, RunConfig, load_config
from dopolab.harness.persistence import save_csv, to_jsonable
from dopolab.harness.runner import config_from_manifest, phi_label, run_ensemble, verify_outputs
from dopolab.harness.sweep import AXES, SweepPoint, sweep, write_figures
from dopolab.harness.validate import validate
from dopolab.observables.spectrum import fit_dark_spectrum
from dopolab.params import (
    DimensionlessParams,
    PhysicalSetup,
    derived_rates,
    dimensionless,
    pump_power_for_sigma,
    threshold_pump_amplitude,
    waist_radius,
)

EXIT_VALIDATION = 2
EXIT_DIVERGENCE = 3


def _handle_errors(func):
    """Map library failures to exit codes: 3 for the divergence budget, 1 for the rest."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except DivergenceThresholdExceeded as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(EXIT_DIVERGENCE) from exc
        except DopoError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _parse_overrides(pairs: Iterable[str]) -> Dict[str, object]:
    out: Dict[str, object] = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep or "." not in key:
            raise click.ClickException(f"--set expects section.key=value, got {pair!r}")
        out[key.strip()] = yaml.safe_load(raw)
    return out


def _echo_json(payload) -> None:
    click.echo(json.dumps(to_jsonable(payload), indent=2, sort_keys=True))


def _emit(frame: pd.DataFrame, out: Optional[str]) -> None:
    if out:
        save_csv(Path(out), frame)
        click.echo(f"wrote {out} ({len(frame)} rows)")
    else:
        with pd.option_context("display.max_rows", None, "display.width", None):
            click.echo(frame.to_string(index=False, float_format=lambda x: f"{x:.6g}"))


def _omega(text: str) -> np.ndarray:
    return OmegaGrid.parse(text).values()


@click.group()
@click.version_option(__version__, prog_name="opo")
@click.option(
    "--log-level",
    default="INFO",
    show_default=True,
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
)
def cli(log_level: str) -> None:
    """Two-transverse-mode DOPO: classical solutions, linearized theory and positive-P ensembles."""
    logging.basicConfig(level=getattr(logging, log_level.upper()), format="%(asctime)s %(levelname)s %(name)s %(message)s")


@cli.command("params")
@click.option("--config", "config_path", default=None, help="YAML run config; its physical section is used if present")
@click.option("--sigma-target", type=float, default=None, help="Also report the laser power giving this sigma")
@_handle_errors
def params_cmd(config_path: Optional[str], sigma_target: Optional[float]) -> None:
    """Dimensionless parameters, and cavity rates for a physical setup."""
    config = load_config(config_path) if config_path else RunConfig()
    report = {"dimensionless": config.params.as_dict()}
    setup = config.physical
    if setup is None and sigma_target is not None:
        setup = PhysicalSetup()
    if setup is not None:
        report["rates"] = derived_rates(setup)._asdict()
        report["waist_pump_m"] = waist_radius(setup, "pump")
        report["waist_signal_m"] = waist_radius(setup, "signal")
        report["threshold_pump_amplitude"] = threshold_pump_amplitude(setup)
        report["setup_dimensionless"] = dimensionless(setup).as_dict()
        if sigma_target is not None:
            report["laser_power_for_sigma_W"] = pump_power_for_sigma(setup, sigma_target)
    _echo_json(report)


@cli.command("classical")
@click.option("--sigma", type=float, default=math.sqrt(2.0), show_default=True)
@click.option("--kappa", type=float, default=1.0, show_default=True)
@click.option("--theta", type=float, default=0.0, show_default=True, help="Pattern orientation (rad)")
@click.option("--waist", type=float, default=None, help="Signal waist (m) for --out; default from the standard setup")
@click.option("--grid", type=int, default=128, show_default=True)
@click.option("--out", default=None, help="CSV of the bright pattern on a Cartesian grid")
@_handle_errors
def classical_cmd(sigma: float, kappa: float, theta: float, waist: Optional[float], grid: int, out: Optional[str]) -> None:
    """Steady state, its stability eigenvalues and optionally the sampled pattern."""
    state = steady_state(sigma, theta)
    eig = stability_eigenvalues(sigma, kappa)
    _echo_json(
        {
            "branch": state.branch,
            "beta0": state.beta0,
            "beta_plus": state.beta_plus,
            "beta_minus": state.beta_minus,
            "eigenvalues": [complex(e) for e in eig],
        }
    )
    if out:
        w = waist if waist is not None else waist_radius(PhysicalSetup(), "signal")
        samples = cartesian_grid(w, n=grid)
        _emit(pattern_frame(bright_pattern(sigma, theta, samples, w), samples), out)


@cli.command("analytic")
@click.option("--sigma", type=float, default=math.sqrt(2.0), show_default=True)
@click.option("--g", type=float, default=1e-3, show_default=True)
@click.option("--omega", default="0:10:41", show_default=True, help="start:stop:num")
@click.option("--phi-deg", type=float, multiple=True, help="Extra dark-quadrature phases (deg)")
@click.option("--out", default=None)
@_handle_errors
def analytic_cmd(sigma: float, g: float, omega: str, phi_deg, out: Optional[str]) -> None:
    """Linearized spectra of the rotating bright and dark modes."""
    w = _omega(omega)
    spectra = bright_dark_spectra(w, sigma)
    frame = pd.DataFrame({"omega": w, **spectra._asdict()})
    for p in phi_deg:
        frame[f"X_dark_phi{phi_label(p)}"] = dark_quadrature_spectrum(w, math.radians(p))
    click.echo(f"D = {diffusion_coefficient(sigma, g):.6g}  (V_theta = D tau)")
    _emit(frame, out)


@cli.command("simulate")
@click.option("--config", "config_path", default=None, help="YAML run config")
@click.option("--manifest", "manifest_path", default=None, help="Re-run the config recorded in a manifest")
@click.option("--set", "overrides", multiple=True, help="section.key=value, repeatable")
@click.option("--seed", type=int, default=None, help="Master seed (required unless --manifest)")
@click.option("--trajectories", type=int, default=None)
@click.option("--workers", type=int, default=None)
@click.option("--out", "out_dir", default=None)
@click.option("--resume", is_flag=True, help="Continue from the checkpoint in the output directory")
@_handle_errors
def simulate_cmd(config_path, manifest_path, overrides, seed, trajectories, workers, out_dir, resume) -> None:
    """Integrate a positive-P ensemble and write variance/spectrum CSVs and a manifest."""
    recorded = None
    if manifest_path:
        config = config_from_manifest(manifest_path)
        recorded = json.loads(Path(manifest_path).read_text(encoding="utf-8"))["outputs"]
    else:
        if seed is None:
            raise click.UsageError("--seed is required unless --manifest is given")
        config = load_config(config_path) if config_path else RunConfig()
    changes = _parse_overrides(overrides)
    changes.update(
        {
            "ensemble.master_seed": seed,
            "ensemble.trajectories": trajectories,
            "ensemble.workers": workers,
            "output.out_dir": out_dir,
        }
    )
    config = config.with_overrides(changes)
    result = run_ensemble(config, resume=resume)
    m = result.manifest
    click.echo(f"[simulate] {m['trajectories']} trajectories, {m['diverged']} diverged, {m['wall_time_s']:.1f} s -> {result.out_dir}")
    if recorded is not None:
        same = {name: m["outputs"].get(name) == digest for name, digest in recorded.items()}
        click.echo(f"[simulate] digests reproduced: {all(same.values())}")


@cli.command("spectrum")
@click.argument("run_dir")
@click.option("--db", is_flag=True, help="Add a dB column")
@_handle_errors
def spectrum_cmd(run_dir: str, db: bool) -> None:
    """Print the estimated spectra of a finished run; fits the phase-quadrature dip in rotating mode."""
    out = Path(run_dir)
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    checks = verify_outputs(out, manifest)
    if not all(checks.values()):
        click.echo(f"warning: outputs changed since the run: {[k for k, ok in checks.items() if not ok]}", err=True)
    mode = manifest["config"]["detection"]["mode"]
    for phi_deg in manifest["config"]["detection"]["phi_deg"]:
        frame = pd.read_csv(out / f"spectrum_{mode}_phi{phi_label(phi_deg)}.csv")
        if db:
            frame["v_out_db"] = to_db(frame["v_out"])
        click.echo(f"--- {mode} phi = {phi_deg:g} deg")
        _emit(frame, None)
        if mode == "rotating" and math.isclose(phi_deg, 90.0):
            spec = SpectrumResult(frame["omega"].to_numpy(), frame["v_out"].to_numpy(), frame["stderr"].to_numpy())
            try:
                fit = fit_dark_spectrum(spec)
            except MinimizerError as exc:
                click.echo(f"fit failed: {exc}", err=True)
                continue
            click.echo(f"fit a = {fit.a:.5f} +- {fit.a_err:.2g}, b = {fit.b:.5f} +- {fit.b_err:.2g}")


@cli.command("fixed-lo")
@click.option("--sigma", type=float, default=math.sqrt(2.0), show_default=True)
@click.option("--d", "d", type=float, default=1e-12, show_default=True)
@click.option("--phi-deg", type=float, default=90.0, show_default=True)
@click.option("--T", "T", type=float, default=None, help="Detection window; default the optimal one")
@click.option("--omega", default="0:2:81", show_default=True, help="start:stop:num")
@click.option("--composed", is_flag=True, help="Add the correlation-composed prediction (no small-d expansion)")
@click.option("--out", default=None)
@_handle_errors
def fixed_lo_cmd(sigma: float, d: float, phi_deg: float, T: Optional[float], omega: str, composed: bool, out: Optional[str]) -> None:
    """Spectrum of the dark mode seen by a non-rotating local oscillator."""
    phi = math.radians(phi_deg)
    window = optimal_detection_time(sigma, d) if T is None else T
    config = DetectionConfig(phi=phi, T=window, mode="fixed")
    w = _omega(omega)
    v = fixed_lo_spectrum(w, config, d, sigma)
    frame = pd.DataFrame({"omega": w, "v_out": v, "v_out_db": to_db(v)})
    if composed:
        frame["v_composed"] = fixed_lo_spectrum_composed(w, config, d, sigma)
    w_opt = optimal_noise_frequency(phi, sigma, d, T=window)
    click.echo(f"T = {window:.6g}  T_opt = {optimal_detection_time(sigma, d):.6g}  omega_opt = {w_opt:.6g}")
    _emit(frame, out)


@cli.command("compare")
@click.argument("run_dir")
@click.option("--sigma", type=float, default=None, help="Expected sigma; a mismatch with the run is an error")
@click.option("--kappa", type=float, default=None)
@click.option("--g", type=float, default=None)
@_handle_errors
def compare_cmd(run_dir: str, sigma, kappa, g) -> None:
    """Compare a finished run with the linearized theory (exit 2 on failure)."""
    expected = None
    if sigma is not None or kappa is not None or g is not None:
        recorded = json.loads((Path(run_dir) / "manifest.json").read_text(encoding="utf-8"))["params"]
        expected = DimensionlessParams(
            sigma=recorded["sigma"] if sigma is None else sigma,
            kappa=recorded["kappa"] if kappa is None else kappa,
            g=recorded["g"] if g is None else g,
        )
    report = compare_run(run_dir, params=expected)
    for check in report.checks:
        click.echo(f"{'PASS' if check.passed else 'FAIL'}  {check.name}: {check.value}")
    if not report.passed:
        raise SystemExit(EXIT_VALIDATION)


@cli.command("sweep")
@click.option("--axis", type=click.Choice(AXES), default=None)
@click.option("--grid", default=None, help="start:stop:num (linear); prefix with log: for log10 spacing")
@click.option("--sigma", type=float, default=math.sqrt(2.0), show_default=True)
@click.option("--d", "d", type=float, default=1e-12, show_default=True)
@click.option("--phi-deg", type=float, default=90.0, show_default=True)
@click.option("--T", "T", type=float, default=None)
@click.option("--omega", type=float, default=0.0, show_default=True)
@click.option("--figures", "figures_dir", default=None, help="Write every figure table to this directory")
@click.option("--plot", is_flag=True, help="Render PNGs next to the figure tables")
@click.option("--out", default=None)
@_handle_errors
def sweep_cmd(axis, grid, sigma, d, phi_deg, T, omega, figures_dir, plot, out) -> None:
    """Fixed-LO closed form over one axis, or the full set of figure tables."""
    if figures_dir:
        for path in write_figures(figures_dir, sigma=sigma, plot=plot):
            click.echo(f"wrote {path}")
        return
    if axis is None or grid is None:
        raise click.UsageError("give --axis and --grid, or --figures")
    log_scale = grid.startswith("log:")
    values = OmegaGrid.parse(grid[4:] if log_scale else grid).values()
    if log_scale:
        values = 10.0 ** values
    if axis == "phi":
        values = np.radians(values)
    base = SweepPoint(phi=math.radians(phi_deg), d=d, T=T, omega=omega, sigma=sigma)
    frame = sweep(base, axis, values)
    if axis == "phi":
        frame.insert(0, "phi_deg", np.degrees(frame["phi"]))
    _emit(frame, out)


@cli.command("validate")
@click.option("--full", is_flag=True, help="Add the desk-scale Monte Carlo checks (minutes)")
@click.option("--seed", type=int, default=20240601, show_default=True)
@click.option("--out", "out_dir", default="runs/validate", show_default=True)
@click.option("--desk-config", default="configs/desk.yml", show_default=True)
@click.option("--fixed-lo-config", default="configs/fixed_lo.yml", show_default=True)
@_handle_errors
def validate_cmd(full: bool, seed: int, out_dir: str, desk_config: str, fixed_lo_config: str) -> None:
    """Run the acceptance checks (exit 2 on failure)."""
    report = validate(out_dir, full=full, seed=seed, desk_config=desk_config, fixed_lo_config=fixed_lo_config)
    for c in report.checks:
        click.echo(f"{'PASS' if c['passed'] else 'FAIL'}  [{c['criterion']}] {c['name']}: {c['value']}")
    click.echo(f"evidence: {report.evidence}")
    if not report.passed:
        raise SystemExit(EXIT_VALIDATION)


if __name__ == "__main__":
    cli()
