"""Per-camera-pair adversarial training.

Adam (betas 0.5/0.999), generator lr 2e-4 and discriminator lr 1e-4, held
constant for ``epochs_constant`` epochs then decayed linearly to zero over
``epochs_decay``. A history pool of generated images (size 50, switchable)
feeds the discriminator updates.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field
from itertools import chain
from pathlib import Path
from typing import Sequence

import numpy as np
import torch

from camstyle.cyclegan.config import CycleGANConfig
from camstyle.cyclegan.networks import build_discriminator, build_generator
from camstyle.cyclegan.objectives import PairNets, adversarial_loss, total_objective
from camstyle.errors import CheckpointError, ConfigError
from camstyle.imageops import to_chw_tensor

CHECKPOINT_FORMAT_VERSION = 1


def lr_factor(epoch: int, epochs_constant: int, epochs_decay: int) -> float:
    """Schedule multiplier for a 1-indexed epoch: flat, then linear to zero."""
    if epoch < 1:
        raise ValueError("epochs are 1-indexed")
    if epoch <= epochs_constant:
        return 1.0
    if epochs_decay == 0:
        return 0.0
    return max(0.0, 1.0 - (epoch - epochs_constant) / epochs_decay)


def lr_at_epoch(base_lr: float, epoch: int, config: CycleGANConfig) -> float:
    return base_lr * lr_factor(epoch, config.epochs_constant, config.epochs_decay)


class ImagePool:
    """History buffer of generated images for discriminator updates.

    With probability 0.5 a query swaps the incoming image for a stored one,
    which stabilizes the discriminator against generator oscillation.
    """

    def __init__(self, size: int, seed: int = 0):
        self.size = size
        self._images: list[torch.Tensor] = []
        self._rng = random.Random(seed)

    def query(self, images: torch.Tensor) -> torch.Tensor:
        if self.size <= 0:
            return images
        out = []
        for img in images:
            img = img.unsqueeze(0)
            if len(self._images) < self.size:
                self._images.append(img.clone())
                out.append(img)
            elif self._rng.random() < 0.5:
                idx = self._rng.randrange(self.size)
                out.append(self._images[idx].clone())
                self._images[idx] = img.clone()
            else:
                out.append(img)
        return torch.cat(out, dim=0)


@dataclass
class CameraPairModel:
    """Trained translators for one unordered camera pair (canonical a < b)."""

    camera_a: int
    camera_b: int
    G: torch.nn.Module  # camera_a -> camera_b
    F: torch.nn.Module  # camera_b -> camera_a
    config: CycleGANConfig
    training_log: list[dict] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.camera_a < self.camera_b:
            raise ConfigError(
                f"camera pair must be canonical (a < b), got ({self.camera_a}, {self.camera_b})")

    @property
    def pair(self) -> tuple[int, int]:
        return (self.camera_a, self.camera_b)

    @torch.no_grad()
    def translate(self, images: np.ndarray, direction: str) -> np.ndarray:
        """Map images across the pair; 'G' is a->b, 'F' is b->a. Deterministic."""
        if direction not in ("G", "F"):
            raise ValueError(f"direction must be 'G' or 'F', got {direction!r}")
        net = self.G if direction == "G" else self.F
        net.eval()
        out = net(to_chw_tensor(images))
        from camstyle.imageops import from_chw_tensor
        return from_chw_tensor(out)


def _epoch_indices(n: int, steps: int, batch: int, rng: np.random.Generator) -> np.ndarray:
    """Shuffled indices cycled to cover steps*batch draws."""
    order = rng.permutation(n)
    flat = np.arange(steps * batch)
    return order[flat % n]


def train_pair(data_a: np.ndarray, data_b: np.ndarray, config: CycleGANConfig,
               cameras: tuple[int, int] = (1, 2)) -> CameraPairModel:
    """Train the G/F pair on two image domains (N,H,W,3 float in [0,1]).

    Deterministic given ``config.seed``; per-epoch mean loss components and
    learning rates land in ``training_log``.
    """
    data_a = np.asarray(data_a, dtype=np.float32)
    data_b = np.asarray(data_b, dtype=np.float32)
    if data_a.ndim != 4 or data_b.ndim != 4:
        raise ValueError("domains must be (N,H,W,3) arrays")
    if len(data_a) == 0 or len(data_b) == 0:
        raise ValueError("both domains need at least one image")
    s = config.image_size
    if data_a.shape[1:3] != (s, s) or data_b.shape[1:3] != (s, s):
        raise ValueError(
            f"domains must be resized to the configured square size {s}, "
            f"got {data_a.shape[1:3]} and {data_b.shape[1:3]}")

    torch.manual_seed(config.seed)
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0xA]))

    nets = PairNets(
        g_ab=build_generator(config),
        g_ba=build_generator(config),
        d_a=build_discriminator(config),
        d_b=build_discriminator(config),
    )
    opt_g = torch.optim.Adam(chain(nets.g_ab.parameters(), nets.g_ba.parameters()),
                             lr=config.lr_generator, betas=(config.beta1, config.beta2))
    opt_d = torch.optim.Adam(chain(nets.d_a.parameters(), nets.d_b.parameters()),
                             lr=config.lr_discriminator, betas=(config.beta1, config.beta2))
    pool_size = config.pool_size if config.use_image_pool else 0
    pool_a = ImagePool(pool_size, seed=config.seed + 1)
    pool_b = ImagePool(pool_size, seed=config.seed + 2)

    tensors_a = to_chw_tensor(data_a)
    tensors_b = to_chw_tensor(data_b)
    steps = int(np.ceil(max(len(data_a), len(data_b)) / config.batch_size))
    log: list[dict] = []

    for epoch in range(1, config.total_epochs + 1):
        factor = lr_factor(epoch, config.epochs_constant, config.epochs_decay)
        for group in opt_g.param_groups:
            group["lr"] = config.lr_generator * factor
        for group in opt_d.param_groups:
            group["lr"] = config.lr_discriminator * factor

        idx_a = _epoch_indices(len(data_a), steps, config.batch_size, rng)
        idx_b = _epoch_indices(len(data_b), steps, config.batch_size, rng)
        sums: dict[str, float] = {}
        for step in range(steps):
            sl = slice(step * config.batch_size, (step + 1) * config.batch_size)
            a = tensors_a[idx_a[sl]]
            b = tensors_b[idx_b[sl]]

            parts = total_objective(a, b, nets, config)
            opt_g.zero_grad()
            parts["total"].backward()
            opt_g.step()

            with torch.no_grad():
                fake_b = pool_b.query(nets.g_ab(a))
                fake_a = pool_a.query(nets.g_ba(b))
            loss_d_a = adversarial_loss(nets.d_a(a), nets.d_a(fake_a), "discriminator")
            loss_d_b = adversarial_loss(nets.d_b(b), nets.d_b(fake_b), "discriminator")
            opt_d.zero_grad()
            (loss_d_a + loss_d_b).backward()
            opt_d.step()

            for k, v in parts.items():
                sums[k] = sums.get(k, 0.0) + float(v.detach())
            sums["d_a"] = sums.get("d_a", 0.0) + float(loss_d_a.detach())
            sums["d_b"] = sums.get("d_b", 0.0) + float(loss_d_b.detach())

        entry = {k: v / steps for k, v in sums.items()}
        entry.update(epoch=epoch, lr_generator=config.lr_generator * factor,
                     lr_discriminator=config.lr_discriminator * factor)
        log.append(entry)

    nets.g_ab.eval()
    nets.g_ba.eval()
    return CameraPairModel(camera_a=min(cameras), camera_b=max(cameras),
                           G=nets.g_ab, F=nets.g_ba, config=config, training_log=log)


def save_pair(model: CameraPairModel, path: Path | str) -> Path:
    """Checkpoint with a versioned header; loadable without the training data."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save({
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "camera_pair": [model.camera_a, model.camera_b],
        "config": asdict(model.config),
        "G": model.G.state_dict(),
        "F": model.F.state_dict(),
        "training_log": model.training_log,
    }, path)
    return path


def load_pair(path: Path | str) -> CameraPairModel:
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"missing pair checkpoint: {path}")
    blob = torch.load(path, map_location="cpu", weights_only=False)
    version = blob.get("format_version")
    if version != CHECKPOINT_FORMAT_VERSION:
        raise CheckpointError(
            f"unsupported checkpoint format {version!r} in {path} "
            f"(expected {CHECKPOINT_FORMAT_VERSION})")
    config = CycleGANConfig(**blob["config"])
    g = build_generator(config)
    f = build_generator(config)
    g.load_state_dict(blob["G"])
    f.load_state_dict(blob["F"])
    g.eval()
    f.eval()
    a, b = blob["camera_pair"]
    return CameraPairModel(camera_a=a, camera_b=b, G=g, F=f, config=config,
                           training_log=blob.get("training_log", []))
