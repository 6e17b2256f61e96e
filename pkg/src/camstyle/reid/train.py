"""Mixed real/fake training of the identity classifier and descriptor extraction.

Each batch draws M reals and N fakes per the sampler; the loss is the mean
real cross-entropy plus the mean fake loss (LSR with eps=0.1 by default).
Momentum SGD runs two parameter groups: backbone at ``lr_base`` and the new
head at ``lr_head`` = 10x, both divided by 10 after the decay epoch.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
import torch.nn as nn

from camstyle.data import ImageRecord
from camstyle.errors import CheckpointError, ConfigError
from camstyle.imageops import resize_image, to_chw_tensor
from camstyle.losses import PROB_FLOOR, LossConfig
from camstyle.reid.augment import augment_flip_crop, random_erasing
from camstyle.reid.config import IdeConfig
from camstyle.reid.model import IdeModel, build_ide
from camstyle.sampler import BatchSpec, epoch_plan

CHECKPOINT_FORMAT_VERSION = 1


class MixedBatchCriterion(nn.Module):
    """Batched equivalent of the canonical scalar losses (same flooring).

    With eps=0 the smoothed form reduces to plain cross-entropy, so a single
    path covers every table row; ``camstyle.losses`` holds the scalar
    reference implementations these are tested against.
    """

    def __init__(self, num_classes: int, eps_real: float = 0.0, eps_fake: float = 0.1):
        super().__init__()
        self.num_classes = num_classes
        self.eps_real = eps_real
        self.eps_fake = eps_fake
        self._log_floor = math.log(PROB_FLOOR)

    def _smoothed(self, scores: torch.Tensor, labels: torch.Tensor,
                  eps: float) -> torch.Tensor:
        logp = torch.log_softmax(scores, dim=1).clamp(min=self._log_floor)
        picked = logp.gather(1, labels.view(-1, 1)).squeeze(1)
        return -(1.0 - eps) * picked - (eps / self.num_classes) * logp.sum(dim=1)

    def forward(self, scores_real: torch.Tensor, labels_real: torch.Tensor,
                scores_fake: torch.Tensor | None = None,
                labels_fake: torch.Tensor | None = None
                ) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor | None]:
        if scores_real.shape[0] == 0:
            raise ValueError("batch needs at least one real sample (M >= 1)")
        real_term = self._smoothed(scores_real, labels_real, self.eps_real).mean()
        fake_term = None
        total = real_term
        if scores_fake is not None and scores_fake.shape[0] > 0:
            fake_term = self._smoothed(scores_fake, labels_fake, self.eps_fake).mean()
            total = real_term + fake_term
        return total, real_term, fake_term


@dataclass
class EpochStats:
    epoch: int
    mean_real_loss: float
    mean_fake_loss: float | None
    total_loss: float
    lr_base: float
    lr_head: float


@dataclass
class TrainingReport:
    epochs: list[EpochStats]
    final_checkpoint: str | None = None

    def as_dict(self) -> dict:
        return {"epochs": [asdict(e) for e in self.epochs],
                "final_checkpoint": self.final_checkpoint}


def prepare_images(records: Sequence[ImageRecord],
                   input_size: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Resize records to the model input size; returns (images, labels)."""
    if not records:
        return (np.zeros((0, *input_size, 3), dtype=np.float32),
                np.zeros(0, dtype=np.int64))
    imgs = np.stack([resize_image(r.pixels, input_size) for r in records])
    labels = np.array([r.identity for r in records], dtype=np.int64)
    return imgs, labels


def _augment_batch(images: np.ndarray, config: IdeConfig,
                   rng: np.random.Generator) -> np.ndarray:
    if not (config.use_flip_crop or config.use_random_erasing):
        return images
    out = []
    for img in images:
        if config.use_flip_crop:
            img = augment_flip_crop(img, rng, padding=config.crop_padding)
        if config.use_random_erasing:
            img = random_erasing(img, rng=rng)
        out.append(img)
    return np.stack(out)


def train_reid(model: IdeModel, real_records: Sequence[ImageRecord],
               fake_records: Sequence[ImageRecord], spec: BatchSpec,
               loss_config: LossConfig, config: IdeConfig,
               num_cameras: int | None = None) -> TrainingReport:
    """Train in place over mixed batches; deterministic given config.seed."""
    if num_cameras is None:
        cams = {r.camera for r in real_records}
        num_cameras = max(len(cams), 2)
    num_classes = model.config.num_classes
    for r in real_records:
        if not 0 <= r.identity < num_classes:
            raise ConfigError(f"real label {r.identity} outside [0, {num_classes})")
    for r in fake_records:
        if not 0 <= r.identity < num_classes:
            raise ConfigError(f"fake label {r.identity} outside [0, {num_classes})")
    if spec.ratio_fake > 0 and not fake_records:
        raise ConfigError("batch ratio requests fakes but the fake set is empty")

    torch.manual_seed(config.seed)
    aug_rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0xA6]))
    real_imgs, real_labels = prepare_images(real_records, config.input_size)
    fake_imgs, fake_labels = prepare_images(fake_records, config.input_size)

    criterion = MixedBatchCriterion(num_classes, eps_real=loss_config.eps_real,
                                    eps_fake=loss_config.eps_fake)
    optimizer = torch.optim.SGD([
        {"params": model.backbone_parameters(), "lr": config.lr_base},
        {"params": model.head_parameters(), "lr": config.lr_head},
    ], momentum=config.momentum, weight_decay=config.weight_decay)

    if config.freeze_backbone_bn:
        for m in model.backbone.modules():
            if isinstance(m, (nn.BatchNorm1d, nn.BatchNorm2d)):
                m.eval()
                m.weight.requires_grad_(False)
                m.bias.requires_grad_(False)

    stats: list[EpochStats] = []
    model.train()
    for epoch in range(1, config.total_epochs + 1):
        lr_base, lr_head = config.lr_at_epoch(epoch)
        optimizer.param_groups[0]["lr"] = lr_base
        optimizer.param_groups[1]["lr"] = lr_head
        if config.freeze_backbone_bn:
            for m in model.backbone.modules():
                if isinstance(m, (nn.BatchNorm1d, nn.BatchNorm2d)):
                    m.eval()

        plan = epoch_plan(len(real_records), len(fake_records), spec, num_cameras,
                          epoch=epoch)
        real_sum = fake_sum = total_sum = 0.0
        fake_batches = 0
        for batch in plan.batches:
            r_idx = np.array(batch.real_indices, dtype=np.int64)
            f_idx = np.array(batch.fake_indices, dtype=np.int64)
            if r_idx.size == 0:
                continue
            r_imgs = _augment_batch(real_imgs[r_idx], config, aug_rng)
            scores_real = model.scores(to_chw_tensor(r_imgs))
            labels_real = torch.from_numpy(real_labels[r_idx])
            scores_fake = labels_fake = None
            if f_idx.size:
                f_imgs = _augment_batch(fake_imgs[f_idx], config, aug_rng)
                scores_fake = model.scores(to_chw_tensor(f_imgs))
                labels_fake = torch.from_numpy(fake_labels[f_idx])
            total, real_term, fake_term = criterion(scores_real, labels_real,
                                                    scores_fake, labels_fake)
            optimizer.zero_grad()
            total.backward()
            optimizer.step()
            real_sum += float(real_term.detach())
            total_sum += float(total.detach())
            if fake_term is not None:
                fake_sum += float(fake_term.detach())
                fake_batches += 1
        n_batches = len(plan.batches)
        stats.append(EpochStats(
            epoch=epoch,
            mean_real_loss=real_sum / n_batches,
            mean_fake_loss=(fake_sum / fake_batches) if fake_batches else None,
            total_loss=total_sum / n_batches,
            lr_base=lr_base,
            lr_head=lr_head,
        ))
    model.eval()
    return TrainingReport(epochs=stats)


@torch.no_grad()
def extract_features(model: IdeModel, images: np.ndarray,
                     batch_size: int = 128) -> np.ndarray:
    """Pooled-feature descriptors in evaluation mode; deterministic."""
    model.eval()
    images = np.asarray(images, dtype=np.float32)
    if images.ndim != 4:
        raise ValueError(f"expected (N,H,W,3) images, got shape {images.shape}")
    chunks = []
    for start in range(0, len(images), batch_size):
        batch = to_chw_tensor(images[start:start + batch_size])
        chunks.append(model.features(batch).cpu().numpy())
    if not chunks:
        return np.zeros((0, model.config.feature_dim), dtype=np.float32)
    return np.concatenate(chunks, axis=0).astype(np.float32)


def save_ide(model: IdeModel, path: Path | str, epoch: int | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save({
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "config": asdict(model.config),
        "num_classes": model.config.num_classes,
        "epoch": epoch,
        "state": model.state_dict(),
    }, path)
    return path


def load_ide(path: Path | str) -> IdeModel:
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"missing model checkpoint: {path}")
    blob = torch.load(path, map_location="cpu", weights_only=False)
    version = blob.get("format_version")
    if version != CHECKPOINT_FORMAT_VERSION:
        raise CheckpointError(
            f"unsupported checkpoint format {version!r} in {path} "
            f"(expected {CHECKPOINT_FORMAT_VERSION})")
    cfg = blob["config"]
    cfg["input_size"] = tuple(cfg["input_size"])
    model = build_ide(IdeConfig(**cfg))
    model.load_state_dict(blob["state"])
    model.eval()
    return model
