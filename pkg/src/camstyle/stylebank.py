"""Bank of camera-pair translators and materialization of style-transferred fakes.

A full bank over L cameras holds C(L,2) pair models. Each real training image
from camera c yields one fake per other covered camera c'; the fake keeps the
source identity, takes camera c', and records c as its source camera. Fakes
are materialized once, before retrieval training.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace as dc_replace
from itertools import combinations
from pathlib import Path
from typing import Iterable

import numpy as np

from camstyle.cyclegan import CameraPairModel, CycleGANConfig, load_pair, save_pair, train_pair
from camstyle.data import ImageRecord, CameraDataset, parse_image_dir, save_image
from camstyle.errors import CheckpointError, DatasetError
from camstyle.imageops import resize_batch, resize_image
from camstyle.utils import stable_seed

logger = logging.getLogger(__name__)

BANK_MANIFEST = "bank.json"
FAKES_MANIFEST = "fakes_manifest.jsonl"


@dataclass(frozen=True)
class StyleBank:
    """Mapping from unordered camera pair to its trained translator."""

    pairs: dict[tuple[int, int], CameraPairModel]
    cameras_covered: frozenset[int]

    def __post_init__(self) -> None:
        for (a, b), model in self.pairs.items():
            if not a < b:
                raise ValueError(f"non-canonical pair key ({a}, {b})")
            if (model.camera_a, model.camera_b) != (a, b):
                raise ValueError(f"pair key ({a}, {b}) holds model for {model.pair}")

    def covered_targets(self, source_camera: int) -> list[int]:
        """Cameras reachable from ``source_camera`` through trained pairs."""
        out = []
        for a, b in self.pairs:
            if source_camera == a:
                out.append(b)
            elif source_camera == b:
                out.append(a)
        return sorted(out)

    def model_for(self, camera_x: int, camera_y: int) -> CameraPairModel:
        key = (min(camera_x, camera_y), max(camera_x, camera_y))
        if key not in self.pairs:
            raise KeyError(f"no trained pair model for cameras {key}")
        return self.pairs[key]

    def is_full(self, cameras: Iterable[int]) -> bool:
        cams = sorted(set(cameras))
        return all((a, b) in self.pairs for a, b in combinations(cams, 2))


def train_all_pairs(dataset: CameraDataset, config: CycleGANConfig,
                    pair_subset: Iterable[int] | None = None) -> StyleBank:
    """Train one translator per unordered camera pair.

    ``pair_subset`` restricts which cameras get translators (the
    partial-bank ablation); fakes are later generated only toward covered
    cameras.
    """
    cams = sorted(set(pair_subset)) if pair_subset is not None else sorted(dataset.cameras)
    if not set(cams) <= dataset.cameras:
        raise DatasetError(f"pair subset {cams} not within dataset cameras "
                           f"{sorted(dataset.cameras)}")
    if len(cams) < 2:
        raise DatasetError("need at least 2 cameras to train a translator")

    by_camera: dict[int, np.ndarray] = {}
    for cam in cams:
        imgs = [r.pixels for r in dataset.train if r.camera == cam and not r.junk
                and r.origin == "real"]
        if not imgs:
            raise DatasetError(f"camera {cam} has zero train images")
        stack = np.stack([resize_image(im, (config.image_size, config.image_size))
                          for im in imgs])
        by_camera[cam] = stack

    pairs: dict[tuple[int, int], CameraPairModel] = {}
    for a, b in combinations(cams, 2):
        pair_config = dc_replace(config, seed=stable_seed(config.seed, "pair", a, b))
        logger.info("training pair model %d<->%d (%d vs %d images)",
                    a, b, len(by_camera[a]), len(by_camera[b]))
        pairs[(a, b)] = train_pair(by_camera[a], by_camera[b], pair_config, cameras=(a, b))
    return StyleBank(pairs=pairs, cameras_covered=frozenset(cams))


@dataclass(frozen=True)
class FakeProvenance:
    source_index: int
    source_path: str | None
    pair: tuple[int, int]
    direction: str


@dataclass
class FakeGeneration:
    """Generated fakes plus their provenance and the count of skipped targets."""

    records: list[ImageRecord]
    provenance: list[FakeProvenance]
    skipped: int

    def __len__(self) -> int:
        return len(self.records)


def generate_fakes(dataset: CameraDataset, bank: StyleBank,
                   output_size: tuple[int, int] | None = None,
                   chunk: int = 16) -> FakeGeneration:
    """Translate every real train image toward every covered other camera.

    Output order is fixed: by source record index, then target camera. Targets
    without a trained pair are skipped and counted, never silently dropped.
    ``output_size`` optionally pre-squashes fakes (default keeps the square
    translation resolution; consumers resize as needed).
    """
    sources = [(i, r) for i, r in enumerate(dataset.records)
               if r.role == "train" and r.origin == "real" and not r.junk]
    jobs: list[tuple[int, ImageRecord, int, tuple[int, int], str]] = []
    skipped = 0
    for idx, rec in sources:
        for target in sorted(dataset.cameras - {rec.camera}):
            key = (min(rec.camera, target), max(rec.camera, target))
            if key not in bank.pairs:
                skipped += 1
                continue
            direction = "G" if rec.camera == key[0] else "F"
            jobs.append((idx, rec, target, key, direction))
    if skipped:
        logger.warning("skipped %d fake targets with no trained pair model", skipped)

    # translate in chunks grouped by (pair, direction), then restore order
    outputs: dict[int, np.ndarray] = {}
    by_route: dict[tuple[tuple[int, int], str], list[int]] = {}
    for j, job in enumerate(jobs):
        by_route.setdefault((job[3], job[4]), []).append(j)
    for (key, direction), job_ids in by_route.items():
        model = bank.pairs[key]
        size = model.config.image_size
        for start in range(0, len(job_ids), chunk):
            ids = job_ids[start:start + chunk]
            batch = np.stack([resize_image(jobs[j][1].pixels, (size, size)) for j in ids])
            translated = model.translate(batch, direction)
            if output_size is not None:
                translated = resize_batch(translated, output_size)
            for j, img in zip(ids, translated):
                outputs[j] = img

    records, provenance = [], []
    for j, (idx, rec, target, key, direction) in enumerate(jobs):
        records.append(ImageRecord(
            pixels=outputs[j], identity=rec.identity, camera=target, role="train",
            origin="fake", source_camera=rec.camera, raw_identity=rec.raw_identity))
        provenance.append(FakeProvenance(source_index=idx, source_path=rec.path,
                                         pair=key, direction=direction))
    return FakeGeneration(records=records, provenance=provenance, skipped=skipped)


def export_fakes(generation: FakeGeneration, out_dir: Path | str,
                 force: bool = False) -> Path:
    """Write fakes as images plus a line-delimited manifest; no silent overwrite."""
    out_dir = Path(out_dir)
    if out_dir.exists() and any(out_dir.iterdir()) and not force:
        raise FileExistsError(f"refusing to overwrite non-empty {out_dir} (pass force=True)")
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    for i, (rec, prov) in enumerate(zip(generation.records, generation.provenance)):
        pid = rec.raw_identity if rec.raw_identity is not None else rec.identity
        pid_str = f"{pid:04d}" if pid >= 0 else str(pid)
        name = f"{pid_str}_c{rec.camera}s1_{i:06d}_fake.png"
        try:
            save_image(rec.pixels, out_dir / name)
        except OSError as exc:
            raise OSError(f"failed writing fake image {out_dir / name}: {exc}") from exc
        lines.append(json.dumps({
            "file": name,
            "identity": rec.identity,
            "camera": rec.camera,
            "source_camera": rec.source_camera,
            "source_index": prov.source_index,
            "source_path": prov.source_path,
            "pair": list(prov.pair),
            "direction": prov.direction,
        }, sort_keys=True))
    (out_dir / FAKES_MANIFEST).write_text("\n".join(lines) + ("\n" if lines else ""))
    return out_dir


def load_fakes(fake_dir: Path | str) -> list[ImageRecord]:
    """Round-trip loader for an exported fake directory (uses the manifest)."""
    fake_dir = Path(fake_dir)
    manifest = fake_dir / FAKES_MANIFEST
    if not manifest.exists():
        raise DatasetError(f"missing fake manifest: {manifest}")
    meta = [json.loads(line) for line in manifest.read_text().splitlines() if line.strip()]
    by_name = {r.path and Path(r.path).name: r for r in parse_image_dir(fake_dir, "train")}
    records = []
    for m in meta:
        base = by_name.get(m["file"])
        if base is None:
            raise DatasetError(f"manifest entry without image file: {m['file']}")
        records.append(ImageRecord(
            pixels=base.pixels, identity=m["identity"], camera=m["camera"], role="train",
            origin="fake", source_camera=m["source_camera"],
            raw_identity=base.raw_identity, path=base.path))
    return records


def save_bank(bank: StyleBank, out_dir: Path | str, force: bool = False) -> Path:
    """One checkpoint per pair plus a bank manifest."""
    out_dir = Path(out_dir)
    if out_dir.exists() and any(out_dir.iterdir()) and not force:
        raise FileExistsError(f"refusing to overwrite non-empty {out_dir} (pass force=True)")
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for (a, b), model in sorted(bank.pairs.items()):
        name = f"pair_c{a}_c{b}.pt"
        save_pair(model, out_dir / name)
        entries.append({"pair": [a, b], "file": name})
    (out_dir / BANK_MANIFEST).write_text(json.dumps({
        "format_version": 1,
        "cameras_covered": sorted(bank.cameras_covered),
        "pairs": entries,
    }, indent=2))
    return out_dir


def load_bank(bank_dir: Path | str) -> StyleBank:
    bank_dir = Path(bank_dir)
    manifest = bank_dir / BANK_MANIFEST
    if not manifest.exists():
        raise CheckpointError(f"missing bank manifest: {manifest}")
    meta = json.loads(manifest.read_text())
    pairs = {}
    for entry in meta["pairs"]:
        a, b = entry["pair"]
        path = bank_dir / entry["file"]
        pairs[(a, b)] = load_pair(path)
    return StyleBank(pairs=pairs, cameras_covered=frozenset(meta["cameras_covered"]))
