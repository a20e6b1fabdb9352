"""Atomic persistence of run artifacts: JSON documents, CSV tables and block shards."""
from __future__ import annotations

import hashlib
import io
import json
import os
import tempfile
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping

import numpy as np
import pandas as pd

CSV_FLOAT_FORMAT = "%.17g"


def _atomic_write(path: str, data: bytes) -> None:
    """Write *data* to *path* atomically."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(prefix=".tmp_", dir=directory)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_path, path)
    finally:
        try:
            if os.path.exists(tmp_path):
                os.remove(tmp_path)
        except OSError:
            pass


def to_jsonable(obj: Any) -> Any:
    """Return a JSON-serialisable representation of *obj* (numpy scalars and arrays included)."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return to_jsonable(obj.item())
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def save_json(path, obj: Any, **kwargs: Any) -> None:
    """Persist *obj* as JSON to *path* using an atomic write."""
    data = json.dumps(to_jsonable(obj), indent=2, sort_keys=True, **kwargs).encode("utf-8")
    _atomic_write(str(path), data)


def load_json(path) -> Any:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def save_csv(path, frame: pd.DataFrame) -> None:
    """17 significant digits so digests identify results, not formatting."""
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    _atomic_write(str(path), buffer.getvalue().encode("utf-8"))


def save_shard(path, arrays: Mapping[str, np.ndarray]) -> None:
    buffer = io.BytesIO()
    np.savez(buffer, **arrays)
    _atomic_write(str(path), buffer.getvalue())


def load_shard(path) -> Dict[str, np.ndarray]:
    with np.load(path, allow_pickle=False) as data:
        return {key: data[key] for key in data.files}


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def digests(paths: Iterable, root=None) -> Dict[str, str]:
    """Map of file name (relative to *root*) to sha256."""
    out = {}
    for p in paths:
        p = Path(p)
        key = str(p.relative_to(root)) if root is not None else p.name
        out[key] = sha256_file(p)
    return dict(sorted(out.items()))


__all__ = [
    "CSV_FLOAT_FORMAT",
    "digests",
    "load_json",
    "load_shard",
    "save_csv",
    "save_json",
    "save_shard",
    "sha256_file",
    "to_jsonable",
]
