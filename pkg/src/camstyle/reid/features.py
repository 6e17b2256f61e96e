"""Feature-matrix export: flat float32 binary plus a JSON shape sidecar.

The sidecar lives next to the binary as ``<name>.shape.json`` so external
tooling (embedding projectors etc.) can consume the matrix without this
package.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def _sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".shape.json")


def save_features(features: np.ndarray, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arr = np.ascontiguousarray(features, dtype=np.float32)
    if arr.ndim != 2:
        raise ValueError(f"feature matrix must be 2-D, got shape {arr.shape}")
    path.write_bytes(arr.tobytes())
    _sidecar(path).write_text(json.dumps({"dtype": "float32", "shape": list(arr.shape)}))
    return path


def load_features(path: Path | str) -> np.ndarray:
    path = Path(path)
    side = _sidecar(path)
    if not path.exists() or not side.exists():
        raise FileNotFoundError(f"feature matrix needs both {path} and {side}")
    meta = json.loads(side.read_text())
    if meta.get("dtype") != "float32":
        raise ValueError(f"unsupported feature dtype {meta.get('dtype')!r}")
    arr = np.frombuffer(path.read_bytes(), dtype=np.float32)
    return arr.reshape(meta["shape"]).copy()
