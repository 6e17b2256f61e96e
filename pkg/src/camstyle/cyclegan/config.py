"""Configuration for per-camera-pair translation training."""

from __future__ import annotations

from dataclasses import dataclass

from camstyle.errors import ConfigError


@dataclass(frozen=True)
class CycleGANConfig:
    """Translation training knobs.

    Defaults are the full-scale recipe (256px, 9 residual blocks, 30+20
    epochs). ``base_filters`` / ``downsample_layers`` / ``disc_layers`` are
    desk-scale knobs; shrink them together with ``image_size`` for fast runs.
    """

    lambda_cyc: float = 10.0
    lambda_identity: float = 5.0
    residual_blocks: int = 9
    image_size: int = 256
    lr_generator: float = 2e-4
    lr_discriminator: float = 1e-4
    epochs_constant: int = 30
    epochs_decay: int = 20
    batch_size: int = 1
    seed: int = 0
    base_filters: int = 64
    disc_filters: int = 64
    downsample_layers: int = 2
    disc_layers: int = 3
    pool_size: int = 50
    use_image_pool: bool = True
    beta1: float = 0.5
    beta2: float = 0.999

    def __post_init__(self) -> None:
        if self.lr_generator <= 0 or self.lr_discriminator <= 0:
            raise ConfigError("learning rates must be > 0")
        if self.residual_blocks < 1:
            raise ConfigError("residual_blocks must be >= 1")
        if self.epochs_constant + self.epochs_decay < 1:
            raise ConfigError("need at least one training epoch")
        if self.epochs_constant < 0 or self.epochs_decay < 0:
            raise ConfigError("epoch counts must be >= 0")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.image_size < 1 or self.base_filters < 1 or self.disc_filters < 1:
            raise ConfigError("sizes and widths must be >= 1")
        if self.downsample_layers < 0 or self.disc_layers < 1:
            raise ConfigError("layer counts out of range")

    @property
    def total_epochs(self) -> int:
        return self.epochs_constant + self.epochs_decay
