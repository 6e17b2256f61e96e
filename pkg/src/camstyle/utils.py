"""Small shared helpers: seeding, config hashing, run manifests."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import subprocess
import time
from pathlib import Path
from typing import Any

import numpy as np


def stable_seed(*parts: Any) -> int:
    """Derive a 63-bit seed from arbitrary hashable parts, stable across runs."""
    blob = json.dumps([str(p) for p in parts]).encode()
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "big") >> 1


def rng_from(*parts: Any) -> np.random.Generator:
    return np.random.default_rng(stable_seed(*parts))


def to_jsonable(obj: Any) -> Any:
    """Recursively convert dataclasses / numpy scalars / paths into JSON types."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [to_jsonable(v) for v in sorted(obj)] if isinstance(obj, (set, frozenset)) else [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    return obj


def config_hash(obj: Any) -> str:
    """Short stable hash of a configuration object (for table-row auditability)."""
    blob = json.dumps(to_jsonable(obj), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def describe_version() -> str:
    """git-describe of the source tree when available, else the package version."""
    from camstyle import __version__

    root = Path(__file__).resolve().parents[2]
    try:
        out = subprocess.run(
            ["git", "-C", str(root), "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"camstyle-{__version__}+g{out.stdout.strip()}"
    except OSError:
        pass
    return f"camstyle-{__version__}"


def write_manifest(out_dir: Path, stage: str, config: Any, started: float,
                   artifacts: dict[str, Any] | None = None) -> Path:
    """Write the per-stage run manifest (config echo, version, wall time)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "stage": stage,
        "version": describe_version(),
        "wall_time_s": round(time.time() - started, 3),
        "config_hash": config_hash(config),
        "config": to_jsonable(config),
        "artifacts": to_jsonable(artifacts or {}),
    }
    path = out_dir / f"manifest_{stage.replace('-', '_')}.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return path
