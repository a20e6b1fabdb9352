"""Ensemble orchestration: blocks, workers, checkpoints and result files.

Trajectory indices 0..N-1 are cut into fixed blocks of ``ensemble.block_size``. Each block is
integrated independently (in-process or in a ProcessPoolExecutor) and reduced to additive
per-group sums, which are stored as a shard. Shards are merged in block order, so the outputs do
not depend on the number of workers or on whether the run was resumed.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from .. import __version__
from ..analytics.spectra import SpectrumResult
from ..classical import steady_state
from ..errors import ConfigError, InsufficientDataError
from ..observables.quadratures import QuadratureObserver
from ..observables.spectrum import (
    MIN_SEGMENT,
    SpectralAccumulator,
    post_cutoff,
    stationary_bins,
    stationary_transforms,
    window_slice,
    windowed_transforms,
)
from ..observables.stats import EnsembleStats, GroupedMoments, group_ids, linear_fit
from ..observables.theta import ThetaObserver
from ..sde.integrator import integrate_ensemble
from ..sde.noise import NoiseStream
from ..sde.systems import make_system
from .config import RunConfig
from .persistence import digests, load_json, load_shard, save_csv, save_json, save_shard, to_jsonable
from .watchdog import DivergenceWatchdog, WatchdogConfig

log = logging.getLogger(__name__)

CHECKPOINT = "checkpoint.json"
MANIFEST = "manifest.json"
SHARD_DIR = "shards"


def block_ranges(n_trajectories: int, block_size: int) -> List[Tuple[int, int]]:
    return [(s, min(s + block_size, n_trajectories)) for s in range(0, n_trajectories, block_size)]


def config_digest(config: RunConfig) -> str:
    """Digest of everything that determines the numbers (output options excluded)."""
    echo = config.to_dict()
    echo.pop("output", None)
    echo["ensemble"].pop("workers", None)
    text = json.dumps(to_jsonable(echo), sort_keys=True)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class SpectralPlan:
    """Frequencies and window shared by every block of a run."""

    estimator: str
    omega: np.ndarray
    duration: float
    rows: slice
    bins: Optional[np.ndarray] = None


def spectral_plan(config: RunConfig) -> SpectralPlan:
    integ, det = config.integrator, config.detection
    times = integ.record_times()
    if det.mode == "rotating":
        rows = post_cutoff(times, config.ensemble.stationary_cutoff)
        n = rows.stop - rows.start
        if n < MIN_SEGMENT:
            raise InsufficientDataError(f"only {n} records after the cutoff tau = {config.ensemble.stationary_cutoff}")
        bins, omega = stationary_bins(n, integ.record_dt, det.omega.stop)
        return SpectralPlan("stationary", omega, n * integ.record_dt, rows, bins)
    rows = window_slice(times, det.t0, config.detection_time)
    n = rows.stop - rows.start
    return SpectralPlan("windowed", det.omega.values(), n * integ.record_dt, rows)


def run_block(config: RunConfig, start: int, stop: int) -> Dict[str, np.ndarray]:
    """Integrate trajectories [start, stop) and reduce them to additive group sums."""
    params = config.params
    integ, ens, det = config.integrator, config.ensemble, config.detection
    system = make_system(integ.system, params)
    indices = np.arange(start, stop)
    y0 = system.initial(steady_state(params.sigma, 0.0), indices.size)
    stream = NoiseStream(ens.master_seed, indices, integ.dt)
    plan = spectral_plan(config)

    theta_obs = ThetaObserver()
    lock = plan.rows.start if det.mode == "fixed" else 0
    quad_obs = QuadratureObserver(det.phis, frame=det.mode, lock_record=lock)
    run = integrate_ensemble(system, y0, integ, stream, observers=(theta_obs, quad_obs))

    groups = group_ids(indices, ens.n_groups)
    mask = run.alive
    moments = GroupedMoments(integ.n_records, ens.n_groups)
    moments.add(theta_obs.values, groups, mask)
    out: Dict[str, np.ndarray] = {
        "trajectories": np.array(indices.size),
        "diverged": np.array(run.n_diverged),
        "branch_crossings": np.array(run.branch_crossings),
        "suspect_jumps": np.array(theta_obs.suspect_jumps),
        "theta_count": moments.count,
        "theta_s1": moments.s1,
        "theta_s2": moments.s2,
    }
    for i, values in enumerate(quad_obs.values):
        segment = values[plan.rows]
        if plan.estimator == "stationary":
            a_pos, a_neg = stationary_transforms(segment, integ.record_dt, plan.bins)
        else:
            a_pos, a_neg = windowed_transforms(segment, integ.record_dt, plan.omega)
        acc = SpectralAccumulator(plan.omega, plan.duration, ens.n_groups)
        acc.add(a_pos, a_neg, groups, mask)
        out[f"spec{i}_count"] = acc.count
        out[f"spec{i}_pos"] = acc.sum_pos
        out[f"spec{i}_neg"] = acc.sum_neg
        out[f"spec{i}_prod"] = acc.sum_prod
    return out


def merge_sums(parts: List[Dict[str, np.ndarray]]) -> Dict[str, np.ndarray]:
    total: Dict[str, np.ndarray] = {}
    for part in parts:
        for key, value in part.items():
            total[key] = total[key] + value if key in total else np.array(value, copy=True)
    return total


@dataclass
class RunResult:
    out_dir: Path
    manifest: Dict[str, Any]
    variance: EnsembleStats
    spectra: Dict[float, SpectrumResult] = field(default_factory=dict)


def _reduce(config: RunConfig, total: Dict[str, np.ndarray]) -> Tuple[EnsembleStats, Dict[float, SpectrumResult]]:
    integ, ens, det = config.integrator, config.ensemble, config.detection
    params = config.params
    moments = GroupedMoments(integ.n_records, ens.n_groups)
    moments.count, moments.s1, moments.s2 = total["theta_count"], total["theta_s1"], total["theta_s2"]
    variance = moments.stats(integ.record_times(), int(total["diverged"]), strict=False)
    plan = spectral_plan(config)
    spectra = {}
    for i, phi_deg in enumerate(det.phi_deg):
        acc = SpectralAccumulator(plan.omega, plan.duration, ens.n_groups)
        acc.count = total[f"spec{i}_count"]
        acc.sum_pos, acc.sum_neg, acc.sum_prod = total[f"spec{i}_pos"], total[f"spec{i}_neg"], total[f"spec{i}_prod"]
        meta = {"phi_deg": phi_deg, "mode": det.mode, "estimator": plan.estimator}
        if plan.estimator == "windowed":
            meta.update(t0=det.t0, T=plan.duration)
        else:
            meta.update(cutoff=ens.stationary_cutoff)
        spectra[phi_deg] = acc.result(params.g, meta, strict=False)
    return variance, spectra


def variance_frame(variance: EnsembleStats, D: Optional[float]) -> pd.DataFrame:
    frame = variance.to_frame()
    if D:
        frame["var_theta_over_D"] = variance.variance / D
        frame["stderr_over_D"] = variance.stderr_variance / D
    return frame


def plot_run(out_dir: Path, variance: EnsembleStats, spectra: Dict[float, SpectrumResult], D: Optional[float]) -> List[Path]:
    """variance.png and spectra.png next to the CSVs."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    fig, ax = plt.subplots(figsize=(9, 4))
    scale = D or 1.0
    ax.errorbar(variance.times, variance.variance / scale, yerr=variance.stderr_variance / scale, fmt=".", ms=2)
    if D:
        ax.plot(variance.times, variance.times, color="black", linewidth=0.8)
    ax.set_xlabel("tau")
    ax.set_ylabel("V_theta / D" if D else "V_theta")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    written.append(out_dir / "variance.png")
    fig.savefig(written[-1], dpi=150)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(9, 4))
    for phi_deg, spec in spectra.items():
        ax.errorbar(spec.omega, spec.v_out, yerr=spec.err, fmt="o-", ms=3, label=f"phi = {phi_deg:g} deg")
    ax.axhline(1.0, color="black", linewidth=0.8)
    ax.set_xlabel("omega")
    ax.set_ylabel("V")
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    written.append(out_dir / "spectra.png")
    fig.savefig(written[-1], dpi=150)
    plt.close(fig)
    return written


def phi_label(phi_deg: float) -> str:
    return f"{phi_deg:g}".replace(".", "p").replace("-", "m")


def _load_checkpoint(out_dir: Path, digest: str) -> List[int]:
    path = out_dir / CHECKPOINT
    if not path.exists():
        return []
    state = load_json(path)
    if state.get("config_digest") != digest:
        raise ConfigError(f"checkpoint in {out_dir} belongs to a different configuration")
    return sorted(b for b in state.get("completed", []) if (out_dir / SHARD_DIR / f"block_{b:06d}.npz").exists())


def run_ensemble(config: RunConfig, resume: bool = False, out_dir=None) -> RunResult:
    """Run the configured ensemble and write variance/spectrum CSVs plus a JSON manifest."""
    ens = config.ensemble
    if ens.master_seed is None:
        raise ConfigError("ensemble.master_seed is required for a simulation run")
    out = Path(out_dir or config.output.out_dir)
    shard_dir = out / SHARD_DIR
    shard_dir.mkdir(parents=True, exist_ok=True)
    digest = config_digest(config)
    blocks = block_ranges(ens.trajectories, ens.block_size)
    done = set(_load_checkpoint(out, digest)) if resume else set()
    if done:
        log.info("[runner] resuming: %d of %d blocks already complete", len(done), len(blocks))

    watchdog = DivergenceWatchdog(WatchdogConfig(threshold=ens.divergence_threshold, planned=ens.trajectories))
    for b in sorted(done):
        shard = load_shard(shard_dir / f"block_{b:06d}.npz")
        watchdog.check(b, int(shard["trajectories"]), int(shard["diverged"]))

    def finish(b: int, sums: Dict[str, np.ndarray]) -> None:
        save_shard(shard_dir / f"block_{b:06d}.npz", sums)
        done.add(b)
        save_json(out / CHECKPOINT, {"config_digest": digest, "completed": sorted(done), "n_blocks": len(blocks)})
        log.info("[runner] block %d/%d done (%d diverged)", len(done), len(blocks), int(sums["diverged"]))
        watchdog.check(b, int(sums["trajectories"]), int(sums["diverged"]))

    started = time.perf_counter()
    todo = [b for b in range(len(blocks)) if b not in done]
    if ens.workers == 1 or len(todo) <= 1:
        for b in todo:
            finish(b, run_block(config, *blocks[b]))
    else:
        with ProcessPoolExecutor(max_workers=ens.workers) as pool:
            futures = {pool.submit(run_block, config, *blocks[b]): b for b in todo}
            for fut in as_completed(futures):
                finish(futures[fut], fut.result())
    wall = time.perf_counter() - started

    total = merge_sums([load_shard(shard_dir / f"block_{b:06d}.npz") for b in range(len(blocks))])
    variance, spectra = _reduce(config, total)
    params = config.params

    files = []
    path = out / "variance.csv"
    save_csv(path, variance_frame(variance, params.D))
    files.append(path)
    for phi_deg, spec in spectra.items():
        path = out / f"spectrum_{config.detection.mode}_phi{phi_label(phi_deg)}.csv"
        save_csv(path, spec.to_frame())
        files.append(path)

    fits: Dict[str, Any] = {}
    if params.D and variance.n_trajectories >= 2:
        fit = linear_fit(variance.times, variance.variance / params.D)
        fits["variance_slope"] = fit._asdict()

    if config.output.plot:
        plot_run(out, variance, spectra, params.D)

    manifest = {
        "tool": "dopolab",
        "version": __version__,
        "config": config.to_dict(),
        "config_digest": digest,
        "params": params.as_dict(),
        "master_seed": ens.master_seed,
        "blocks": [list(r) for r in blocks],
        "wall_time_s": wall,
        "trajectories": int(total["trajectories"]),
        "diverged": int(total["diverged"]),
        "branch_crossings": int(total["branch_crossings"]),
        "suspect_jumps": int(total["suspect_jumps"]),
        "fits": fits,
        "outputs": digests(files, root=out),
    }
    save_json(out / MANIFEST, manifest)
    log.info(
        "[runner] %d trajectories, %d diverged, %.1f s; results in %s",
        manifest["trajectories"],
        manifest["diverged"],
        wall,
        out,
    )
    return RunResult(out_dir=out, manifest=manifest, variance=variance, spectra=spectra)


def config_from_manifest(path) -> RunConfig:
    manifest = load_json(path)
    if "config" not in manifest:
        raise ConfigError(f"{path} is not a run manifest")
    return RunConfig.from_dict(manifest["config"])


def verify_outputs(out_dir, manifest: Dict[str, Any]) -> Dict[str, bool]:
    """Compare files in ``out_dir`` with the digests recorded in ``manifest``."""
    out = Path(out_dir)
    current = digests([out / name for name in manifest["outputs"]], root=out)
    return {name: current.get(name) == expected for name, expected in manifest["outputs"].items()}


__all__ = [
    "RunResult",
    "block_ranges",
    "config_digest",
    "config_from_manifest",
    "merge_sums",
    "phi_label",
    "plot_run",
    "run_block",
    "run_ensemble",
    "spectral_plan",
    "variance_frame",
    "verify_outputs",
]
