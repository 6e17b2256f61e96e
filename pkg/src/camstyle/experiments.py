"""Canned experiment grids: few-camera systems, loss ablation, ratio sweep,
partial translator banks, and augmentation combinations.

Every cell runs with its own derived seed and is reported as one
line-delimited record carrying the full config hash; each experiment also
emits a static plot and a plain-text table.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import time
from pathlib import Path
from typing import Callable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from camstyle.config import ExperimentConfig, load_dataset
from camstyle.data import CameraDataset, restrict_cameras
from camstyle.errors import ConfigError
from camstyle.losses import LossConfig
from camstyle.pipeline import train_and_eval
from camstyle.sampler import BatchSpec
from camstyle.stylebank import generate_fakes, train_all_pairs
from camstyle.utils import config_hash, stable_seed, write_manifest

logger = logging.getLogger(__name__)

EXPERIMENTS = ("few-cameras", "loss-ablation", "ratio-sweep", "partial-bank",
               "augmentation-grid")

RATIO_GRID = ((1, 3), (1, 2), (1, 1), (2, 1), (3, 1))


def _cell_seed(cfg: ExperimentConfig, *tags) -> int:
    return stable_seed(cfg.seed, *tags)


def _run_cell(cfg: ExperimentConfig, dataset: CameraDataset, fakes, *,
              cell: str, use_fakes: bool, loss: LossConfig,
              batch: BatchSpec | None = None,
              ide_overrides: dict | None = None, extra: dict | None = None) -> dict:
    seed = _cell_seed(cfg, cell)
    batch = batch if batch is not None else cfg.batch
    if not use_fakes:
        batch = dataclasses.replace(batch, ratio_fake=0, seed=seed)
    else:
        batch = dataclasses.replace(batch, seed=seed)
    ide = dataclasses.replace(cfg.ide, seed=seed, **(ide_overrides or {}))
    row_config = {"cell": cell, "ide": ide, "batch": batch, "loss": loss,
                  "dataset": dataset.name, "seed": seed}
    logger.info("cell %s (seed %d)", cell, seed)
    metrics = train_and_eval(dataset, list(fakes) if use_fakes else [], ide, batch,
                             loss, cfg.eval_ks)
    row = {"cell": cell, "seed": seed, "config_hash": config_hash(row_config)}
    row.update(extra or {})
    row.update(metrics)
    return row


def _shared_fakes(cfg: ExperimentConfig, dataset: CameraDataset, *tags,
                  pair_subset=None):
    bank_cfg = dataclasses.replace(cfg.cyclegan, seed=_cell_seed(cfg, "bank", *tags))
    bank = train_all_pairs(dataset, bank_cfg, pair_subset=pair_subset)
    return generate_fakes(dataset, bank)


def run_few_cameras(cfg: ExperimentConfig) -> list[dict]:
    """Camera subsets of sizes 2..L, each under the four supervision variants."""
    full = load_dataset(cfg)
    cams = sorted(full.cameras)
    rows = []
    for size in range(2, len(cams) + 1):
        subset = cams[:size]
        dataset = restrict_cameras(full, subset) if size < len(cams) else full
        fakes = _shared_fakes(cfg, dataset, "few", size)
        variants = (
            ("baseline", False, LossConfig(eps_real=0.0, eps_fake=0.0)),
            ("baseline+lsr-real", False, LossConfig(eps_real=cfg.loss.eps_fake or 0.1,
                                                    eps_fake=0.0)),
            ("camstyle-vanilla", True, LossConfig(eps_real=0.0, eps_fake=0.0)),
            ("camstyle-lsr", True, LossConfig(eps_real=0.0, eps_fake=cfg.loss.eps_fake)),
        )
        for method, use_fakes, loss in variants:
            rows.append(_run_cell(
                cfg, dataset, fakes.records, cell=f"{method}@L{size}",
                use_fakes=use_fakes, loss=loss,
                extra={"method": method, "num_cameras": size}))
    return rows


def run_loss_ablation(cfg: ExperimentConfig) -> list[dict]:
    """The four training-data / loss-function rows."""
    dataset = load_dataset(cfg)
    fakes = _shared_fakes(cfg, dataset, "loss")
    eps = cfg.loss.eps_fake or 0.1
    variants = (
        ("real-crossE", False, LossConfig(0.0, 0.0), "Real", "CrossE", "None"),
        ("real-lsr", False, LossConfig(eps, 0.0), "Real", "LSR", "None"),
        ("real+fake-crossE", True, LossConfig(0.0, 0.0), "Real+Fake", "CrossE", "CrossE"),
        ("real+fake-lsr", True, LossConfig(0.0, eps), "Real+Fake", "CrossE", "LSR"),
    )
    rows = []
    for cell, use_fakes, loss, data, loss_r, loss_f in variants:
        rows.append(_run_cell(cfg, dataset, fakes.records, cell=cell,
                              use_fakes=use_fakes, loss=loss,
                              extra={"training_data": data, "loss_real": loss_r,
                                     "loss_fake": loss_f}))
    return rows


def run_ratio_sweep(cfg: ExperimentConfig) -> list[dict]:
    """Real:fake mini-batch ratios plus the fake-free baseline."""
    dataset = load_dataset(cfg)
    fakes = _shared_fakes(cfg, dataset, "ratio")
    rows = [_run_cell(cfg, dataset, fakes.records, cell="baseline", use_fakes=False,
                      loss=LossConfig(0.0, 0.0), extra={"ratio": "baseline"})]
    for m, n in RATIO_GRID:
        batch = dataclasses.replace(cfg.batch, ratio_real=m, ratio_fake=n)
        rows.append(_run_cell(cfg, dataset, fakes.records, cell=f"ratio-{m}:{n}",
                              use_fakes=True, loss=cfg.loss, batch=batch,
                              extra={"ratio": f"{m}:{n}"}))
    return rows


def run_partial_bank(cfg: ExperimentConfig) -> list[dict]:
    """Translators trained on growing camera prefixes; re-ID always full-camera."""
    dataset = load_dataset(cfg)
    cams = sorted(dataset.cameras)
    rows = [_run_cell(cfg, dataset, [], cell="baseline", use_fakes=False,
                      loss=LossConfig(0.0, 0.0),
                      extra={"bank_cameras": "none", "bank_size": 0})]
    for k in range(2, len(cams) + 1):
        subset = cams[:k]
        fakes = _shared_fakes(cfg, dataset, "partial", k, pair_subset=subset)
        label = "+".join(str(c) for c in subset)
        rows.append(_run_cell(cfg, dataset, fakes.records, cell=f"bank-{label}",
                              use_fakes=True, loss=cfg.loss,
                              extra={"bank_cameras": label, "bank_size": k,
                                     "skipped_targets": fakes.skipped}))
    return rows


def run_augmentation_grid(cfg: ExperimentConfig) -> list[dict]:
    """All on/off combinations of flip+crop, random erasing, and style transfer."""
    dataset = load_dataset(cfg)
    fakes = _shared_fakes(cfg, dataset, "aug")
    rows = []
    for rf_rc in (False, True):
        for re_on in (False, True):
            for cam_on in (False, True):
                cell = f"rfrc={int(rf_rc)},re={int(re_on)},camstyle={int(cam_on)}"
                rows.append(_run_cell(
                    cfg, dataset, fakes.records, cell=cell, use_fakes=cam_on,
                    loss=cfg.loss if cam_on else LossConfig(0.0, 0.0),
                    ide_overrides={"use_flip_crop": rf_rc, "use_random_erasing": re_on},
                    extra={"rf_rc": rf_rc, "random_erasing": re_on, "camstyle": cam_on}))
    return rows


_RUNNERS: dict[str, Callable[[ExperimentConfig], list[dict]]] = {
    "few-cameras": run_few_cameras,
    "loss-ablation": run_loss_ablation,
    "ratio-sweep": run_ratio_sweep,
    "partial-bank": run_partial_bank,
    "augmentation-grid": run_augmentation_grid,
}


def _plot(name: str, rows: list[dict], path: Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if name == "few-cameras":
        methods = sorted({r["method"] for r in rows})
        for method in methods:
            pts = sorted((r["num_cameras"], r["rank-1"]) for r in rows
                         if r["method"] == method)
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=method)
        ax.set_xlabel("cameras in system")
        ax.set_ylabel("rank-1")
        ax.legend()
    elif name == "ratio-sweep":
        labels = [r["ratio"] for r in rows]
        ax.bar(range(len(rows)), [r["rank-1"] for r in rows])
        ax.set_xticks(range(len(rows)), labels, rotation=45)
        ax.set_ylabel("rank-1")
    elif name == "partial-bank":
        pts = sorted((r["bank_size"], r["rank-1"]) for r in rows)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o")
        ax.set_xlabel("cameras used for translator training")
        ax.set_ylabel("rank-1")
    else:
        labels = [r["cell"] for r in rows]
        ax.bar(range(len(rows)), [r["rank-1"] for r in rows])
        ax.set_xticks(range(len(rows)), labels, rotation=60, fontsize=7)
        ax.set_ylabel("rank-1")
    ax.set_title(name)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def _write_table(rows: list[dict], path: Path) -> None:
    keys = ["cell", "rank-1", "mAP", "seed", "config_hash"]
    widths = {k: max(len(k), *(len(_fmt(r.get(k))) for r in rows)) for k in keys}
    lines = ["  ".join(k.ljust(widths[k]) for k in keys)]
    for r in rows:
        lines.append("  ".join(_fmt(r.get(k)).ljust(widths[k]) for k in keys))
    path.write_text("\n".join(lines) + "\n")


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def run_experiment(name: str, cfg: ExperimentConfig, out_dir: Path | str) -> list[dict]:
    """Run one named grid; emit results.jsonl, a text table, and a plot."""
    if name not in _RUNNERS:
        raise ConfigError(f"unknown experiment {name!r}; choose from {EXPERIMENTS}")
    started = time.time()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = _RUNNERS[name](cfg)
    for row in rows:
        row["experiment"] = name
    results = out_dir / "results.jsonl"
    results.write_text("\n".join(json.dumps(r, sort_keys=True) for r in rows) + "\n")
    _write_table(rows, out_dir / "results_table.txt")
    _plot(name, rows, out_dir / f"{name}.png")
    write_manifest(out_dir, name, cfg, started, artifacts={
        "results": results, "plot": out_dir / f"{name}.png", "cells": len(rows)})
    return rows
