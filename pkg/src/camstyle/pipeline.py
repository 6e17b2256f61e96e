"""Pipeline stages shared by the CLI and the experiment harness.

Stage order mirrors the augmentation workflow: train pair translators,
materialize fakes, train the retrieval model on mixed batches, evaluate.
Every stage writes a manifest (config echo, version, wall time) into its
output directory.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from camstyle import evaluation
from camstyle.config import ExperimentConfig, load_dataset
from camstyle.data import CameraDataset, ImageRecord
from camstyle.losses import LossConfig
from camstyle.reid import (
    IdeConfig,
    build_ide,
    extract_features,
    load_features,
    load_ide,
    prepare_images,
    save_features,
    save_ide,
    train_reid,
)
from camstyle.sampler import BatchSpec
from camstyle.stylebank import (
    export_fakes,
    generate_fakes,
    load_bank,
    load_fakes,
    save_bank,
    train_all_pairs,
)
from camstyle.utils import write_manifest

logger = logging.getLogger(__name__)


def real_train_records(dataset: CameraDataset) -> list[ImageRecord]:
    return [r for r in dataset.train if r.origin == "real" and not r.junk]


def eval_metadata(dataset: CameraDataset):
    """Query/gallery arrays for the ranking protocol (junk queries dropped)."""
    queries = [r for r in dataset.query if not r.junk]
    gallery = dataset.gallery
    q_ids = np.array([r.identity for r in queries], dtype=np.int64)
    q_cams = np.array([r.camera for r in queries], dtype=np.int64)
    g_ids = np.array([r.identity for r in gallery], dtype=np.int64)
    g_cams = np.array([r.camera for r in gallery], dtype=np.int64)
    g_junk = np.array([r.junk for r in gallery], dtype=bool)
    return queries, gallery, q_ids, q_cams, g_ids, g_cams, g_junk


def train_and_eval(dataset: CameraDataset, fake_records: Sequence[ImageRecord],
                   ide: IdeConfig, batch: BatchSpec, loss: LossConfig,
                   ks: Sequence[int]) -> dict:
    """One training cell: build, train, extract descriptors, rank. Returns metrics."""
    ide = dataclasses.replace(ide, num_classes=dataset.num_classes)
    import torch

    torch.manual_seed(ide.seed)
    model = build_ide(ide)
    reals = real_train_records(dataset)
    fakes = list(fake_records) if batch.ratio_fake > 0 else []
    report = train_reid(model, reals, fakes, batch, loss, ide,
                        num_cameras=dataset.num_cameras)

    queries, gallery, q_ids, q_cams, g_ids, g_cams, g_junk = eval_metadata(dataset)
    q_imgs, _ = prepare_images(queries, ide.input_size)
    g_imgs, _ = prepare_images(gallery, ide.input_size)
    q_feats = extract_features(model, q_imgs, batch_size=ide.batch_size)
    g_feats = extract_features(model, g_imgs, batch_size=ide.batch_size)
    dist = evaluation.distance_matrix(q_feats, g_feats)
    result = evaluation.evaluate(dist, q_ids, q_cams, g_ids, g_cams, g_junk, ks=ks)

    metrics = result.metrics(ks)
    metrics["num_valid_queries"] = result.num_valid_queries
    metrics["first_epoch_loss"] = report.epochs[0].total_loss
    metrics["final_epoch_loss"] = report.epochs[-1].total_loss
    return metrics


def stage_train_cyclegan(cfg: ExperimentConfig, out_dir: Path,
                         pair_subset: Sequence[int] | None = None) -> Path:
    started = time.time()
    out_dir = Path(out_dir)
    dataset = load_dataset(cfg)
    bank = train_all_pairs(dataset, cfg.cyclegan, pair_subset=pair_subset)
    bank_dir = save_bank(bank, out_dir / "bank", force=True)
    write_manifest(out_dir, "train-cyclegan", cfg, started,
                   artifacts={"bank": bank_dir, "pairs": sorted(bank.pairs)})
    return bank_dir


def stage_generate(cfg: ExperimentConfig, out_dir: Path,
                   bank_dir: Path | None = None) -> Path:
    started = time.time()
    out_dir = Path(out_dir)
    bank_dir = Path(bank_dir) if bank_dir is not None else out_dir / "bank"
    bank = load_bank(bank_dir)
    dataset = load_dataset(cfg)
    generation = generate_fakes(dataset, bank)
    fakes_dir = export_fakes(generation, out_dir / "fakes", force=True)
    write_manifest(out_dir, "generate", cfg, started, artifacts={
        "fakes": fakes_dir, "count": len(generation), "skipped": generation.skipped})
    return fakes_dir


def stage_train_reid(cfg: ExperimentConfig, out_dir: Path,
                     fakes_dir: Path | None = None) -> Path:
    started = time.time()
    out_dir = Path(out_dir)
    dataset = load_dataset(cfg)
    fake_records: list[ImageRecord] = []
    if cfg.batch.ratio_fake > 0:
        fakes_dir = Path(fakes_dir) if fakes_dir is not None else out_dir / "fakes"
        fake_records = load_fakes(fakes_dir)
    ide = dataclasses.replace(cfg.ide, num_classes=dataset.num_classes)
    import torch

    torch.manual_seed(ide.seed)
    model = build_ide(ide)
    report = train_reid(model, real_train_records(dataset), fake_records, cfg.batch,
                        cfg.loss, ide, num_cameras=dataset.num_cameras)
    ckpt = save_ide(model, out_dir / "reid" / "model.pt", epoch=ide.total_epochs)
    report.final_checkpoint = str(ckpt)
    (out_dir / "reid" / "training_report.json").write_text(
        json.dumps(report.as_dict(), indent=2))
    write_manifest(out_dir, "train-reid", cfg, started, artifacts={
        "checkpoint": ckpt, "report": out_dir / "reid" / "training_report.json"})
    return ckpt


def stage_evaluate(cfg: ExperimentConfig, out_dir: Path,
                   checkpoint: Path | None = None,
                   features_query: Path | None = None,
                   features_gallery: Path | None = None) -> Path:
    started = time.time()
    out_dir = Path(out_dir)
    dataset = load_dataset(cfg)
    queries, gallery, q_ids, q_cams, g_ids, g_cams, g_junk = eval_metadata(dataset)

    eval_dir = out_dir / "eval"
    eval_dir.mkdir(parents=True, exist_ok=True)
    if features_query is not None or features_gallery is not None:
        if features_query is None or features_gallery is None:
            raise ValueError("need both --features-query and --features-gallery")
        q_feats = load_features(features_query)
        g_feats = load_features(features_gallery)
    else:
        ckpt = Path(checkpoint) if checkpoint is not None else out_dir / "reid" / "model.pt"
        model = load_ide(ckpt)
        input_size = model.config.input_size
        q_imgs, _ = prepare_images(queries, input_size)
        g_imgs, _ = prepare_images(gallery, input_size)
        q_feats = extract_features(model, q_imgs)
        g_feats = extract_features(model, g_imgs)
        save_features(q_feats, eval_dir / "query_features.f32")
        save_features(g_feats, eval_dir / "gallery_features.f32")

    dist = evaluation.distance_matrix(q_feats, g_feats)
    result = evaluation.evaluate(dist, q_ids, q_cams, g_ids, g_cams, g_junk,
                                 ks=cfg.eval_ks)
    report_path = evaluation.write_report(result, cfg.eval_ks, eval_dir / "report.txt",
                                          per_query_path=eval_dir / "per_query.tsv")
    metrics = result.metrics(cfg.eval_ks)
    metrics["num_valid_queries"] = result.num_valid_queries
    (eval_dir / "metrics.json").write_text(json.dumps(metrics, indent=2, sort_keys=True))
    write_manifest(out_dir, "evaluate", cfg, started, artifacts={
        "report": report_path, "metrics": eval_dir / "metrics.json"})
    return report_path
