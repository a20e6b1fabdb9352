import logging
import shutil

import numpy as np
import pandas as pd
import pytest

from dopolab.errors import ConfigError
from dopolab.harness.config import RunConfig
from dopolab.harness.persistence import load_json, save_json
from dopolab.harness.runner import (
    CHECKPOINT,
    MANIFEST,
    SHARD_DIR,
    block_ranges,
    config_digest,
    config_from_manifest,
    phi_label,
    run_ensemble,
    spectral_plan,
    verify_outputs,
)
from dopolab.harness.validate import determinism_config

SEED = 777


@pytest.fixture(scope="module")
def reference_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("reference")
    return run_ensemble(determinism_config(SEED), out_dir=out)


def test_block_ranges():
    assert block_ranges(10, 4) == [(0, 4), (4, 8), (8, 10)]
    assert block_ranges(3, 5) == [(0, 3)]


def test_digest_ignores_workers_and_output():
    base = determinism_config(SEED)
    assert config_digest(base) == config_digest(base.with_overrides({"ensemble.workers": 8, "output.plot": True}))
    assert config_digest(base) != config_digest(base.with_overrides({"ensemble.master_seed": SEED + 1}))


def test_run_writes_results_and_manifest(reference_run):
    out = reference_run.out_dir
    manifest = load_json(out / MANIFEST)
    assert manifest["trajectories"] == 48
    assert manifest["diverged"] == 0
    assert set(manifest["outputs"]) == {"variance.csv", "spectrum_rotating_phi0.csv", "spectrum_rotating_phi90.csv"}
    assert all(verify_outputs(out, manifest).values())
    variance = pd.read_csv(out / "variance.csv")
    assert variance["var_theta"].iloc[0] == 0.0
    assert variance["var_theta"].iloc[-1] > 0.0
    assert "var_theta_over_D" in variance
    assert "variance_slope" in manifest["fits"]
    assert len(list((out / SHARD_DIR).glob("block_*.npz"))) == 16


def test_results_do_not_depend_on_worker_count(reference_run, tmp_path):
    parallel = run_ensemble(determinism_config(SEED).with_overrides({"ensemble.workers": 3}), out_dir=tmp_path)
    assert parallel.manifest["outputs"] == reference_run.manifest["outputs"]


def test_resume_picks_up_completed_blocks(reference_run, tmp_path, caplog):
    src = reference_run.out_dir / SHARD_DIR
    (tmp_path / SHARD_DIR).mkdir()
    for b in range(5):
        name = f"block_{b:06d}.npz"
        shutil.copy(src / name, tmp_path / SHARD_DIR / name)
    config = determinism_config(SEED)
    save_json(tmp_path / CHECKPOINT, {"config_digest": config_digest(config), "completed": list(range(5))})
    with caplog.at_level(logging.INFO):
        resumed = run_ensemble(config, resume=True, out_dir=tmp_path)
    assert "resuming: 5 of 16" in caplog.text
    assert resumed.manifest["outputs"] == reference_run.manifest["outputs"]
    assert load_json(tmp_path / CHECKPOINT)["completed"] == list(range(16))


def test_resume_refuses_a_foreign_checkpoint(reference_run, tmp_path):
    shutil.copy(reference_run.out_dir / CHECKPOINT, tmp_path / CHECKPOINT)
    with pytest.raises(ConfigError):
        run_ensemble(determinism_config(SEED + 1), resume=True, out_dir=tmp_path)


def test_seed_is_required(tmp_path):
    raw = determinism_config(SEED).to_dict()
    raw["ensemble"]["master_seed"] = None
    with pytest.raises(ConfigError):
        run_ensemble(RunConfig.from_dict(raw), out_dir=tmp_path)


def test_manifest_reproduces_the_config(reference_run):
    config = config_from_manifest(reference_run.out_dir / MANIFEST)
    assert config_digest(config) == reference_run.manifest["config_digest"]


def test_tampered_output_is_detected(reference_run, tmp_path):
    out = tmp_path / "copy"
    shutil.copytree(reference_run.out_dir, out)
    path = out / "variance.csv"
    path.write_text(path.read_text() + "\n")
    check = verify_outputs(out, reference_run.manifest)
    assert check["variance.csv"] is False
    assert check["spectrum_rotating_phi90.csv"] is True


def test_fixed_mode_uses_a_window_of_whole_records(tmp_path):
    config = determinism_config(SEED).with_overrides(
        {
            "detection.mode": "fixed",
            "detection.phi_deg": [89.5, 90.0],
            "detection.T": 0.6,
            "detection.t0": 0.3,
            "detection.omega": "0:2:3",
            "model.sigma": 2.0,
        }
    )
    plan = spectral_plan(config)
    assert plan.estimator == "windowed"
    assert plan.rows == slice(10, 30)
    assert plan.duration == pytest.approx(0.6)
    result = run_ensemble(config, out_dir=tmp_path)
    assert set(result.spectra) == {89.5, 90.0}
    assert result.spectra[90.0].meta["T"] == pytest.approx(0.6)
    assert (tmp_path / f"spectrum_fixed_phi{phi_label(89.5)}.csv").exists()
    assert np.all(np.isfinite(result.spectra[90.0].v_out))


def test_phi_label():
    assert phi_label(90.0) == "90"
    assert phi_label(89.5) == "89p5"
    assert phi_label(-1.0) == "m1"
