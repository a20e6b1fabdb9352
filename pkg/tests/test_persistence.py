import json
from pathlib import Path

import numpy as np
import pandas as pd

from dopolab.harness.persistence import (
    digests,
    load_json,
    load_shard,
    save_csv,
    save_json,
    save_shard,
    sha256_file,
    to_jsonable,
)


def test_json_roundtrip_handles_numpy_and_complex(tmp_path: Path):
    path = tmp_path / "nested" / "doc.json"
    save_json(path, {"a": np.float64(1.5), "b": np.arange(3), "c": 1 + 2j, "d": float("nan")})
    assert load_json(path) == {"a": 1.5, "b": [0, 1, 2], "c": {"re": 1.0, "im": 2.0}, "d": None}
    assert not list(path.parent.glob(".tmp_*"))


def test_to_jsonable_unpacks_dataclasses():
    from dopolab.params import DimensionlessParams

    doc = to_jsonable(DimensionlessParams(sigma=2.0, kappa=1.0, g=0.01))
    assert doc["sigma"] == 2.0
    json.dumps(doc)


def test_csv_keeps_full_precision(tmp_path: Path):
    path = tmp_path / "table.csv"
    value = 0.1 + 0.2
    save_csv(path, pd.DataFrame({"x": [value]}))
    assert pd.read_csv(path, float_precision="round_trip")["x"].iloc[0] == value
    assert "\r" not in path.read_text()


def test_identical_content_has_identical_digest(tmp_path: Path):
    frame = pd.DataFrame({"tau": [0.0, 0.5], "v": [1.0, 2.0 / 3.0]})
    save_csv(tmp_path / "a.csv", frame)
    save_csv(tmp_path / "b.csv", frame.copy())
    assert sha256_file(tmp_path / "a.csv") == sha256_file(tmp_path / "b.csv")
    table = digests([tmp_path / "b.csv", tmp_path / "a.csv"], root=tmp_path)
    assert list(table) == ["a.csv", "b.csv"]


def test_shard_roundtrip(tmp_path: Path):
    path = tmp_path / "shards" / "block_000000.npz"
    arrays = {"theta": np.linspace(0.0, 1.0, 6).reshape(3, 2), "alive": np.array([True, False])}
    save_shard(path, arrays)
    loaded = load_shard(path)
    assert set(loaded) == {"theta", "alive"}
    assert np.array_equal(loaded["theta"], arrays["theta"])
    assert loaded["alive"].dtype == bool
