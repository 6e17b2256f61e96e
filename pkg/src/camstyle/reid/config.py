"""Configuration for the identity-classification retrieval model."""

from __future__ import annotations

from dataclasses import dataclass

from camstyle.errors import ConfigError

BACKBONES = ("reference_resnet50", "tiny_cnn")


@dataclass(frozen=True)
class IdeConfig:
    """Backbone + FC-1024 head and the training schedule.

    The reference backbone is a ResNet-50 trunk (2048-dim pooled feature);
    ``tiny_cnn`` is the desk-scale stand-in whose feature width is
    ``tiny_width * 2**tiny_depth``. New layers (the head) train at
    ``lr_head`` = 10x the backbone rate, both divided by 10 after
    ``lr_decay_epoch`` epochs.
    """

    backbone: str = "reference_resnet50"
    num_classes: int = 751
    embed_dim: int = 1024
    dropout_p: float = 0.5
    input_size: tuple[int, int] = (256, 128)
    lr_base: float = 0.01
    lr_head: float = 0.1
    lr_decay_epoch: int = 40
    total_epochs: int = 50
    batch_size: int = 128
    momentum: float = 0.9
    weight_decay: float = 5e-4
    seed: int = 0
    tiny_depth: int = 2
    tiny_width: int = 16
    use_flip_crop: bool = True
    use_random_erasing: bool = False
    crop_padding: int = 10
    pretrained_backbone: bool = False
    freeze_backbone_bn: bool = False

    def __post_init__(self) -> None:
        if self.backbone not in BACKBONES:
            raise ConfigError(f"unknown backbone {self.backbone!r}; choose from {BACKBONES}")
        if not 0.0 <= self.dropout_p < 1.0:
            raise ConfigError(f"dropout_p must be in [0,1), got {self.dropout_p}")
        if self.total_epochs < self.lr_decay_epoch:
            raise ConfigError("total_epochs must be >= lr_decay_epoch")
        if self.num_classes < 1 or self.embed_dim < 1:
            raise ConfigError("num_classes and embed_dim must be >= 1")
        if self.tiny_depth < 1 or self.tiny_width < 1:
            raise ConfigError("tiny_cnn depth/width must be >= 1")
        if min(self.input_size) < 2 ** (self.tiny_depth + 1) and self.backbone == "tiny_cnn":
            raise ConfigError(
                f"input_size {self.input_size} too small for tiny_cnn depth {self.tiny_depth}")

    @property
    def feature_dim(self) -> int:
        if self.backbone == "reference_resnet50":
            return 2048
        return self.tiny_width * 2 ** self.tiny_depth

    def lr_at_epoch(self, epoch: int) -> tuple[float, float]:
        """(base lr, head lr) for a 1-indexed epoch; divided by 10 after decay."""
        if epoch < 1:
            raise ValueError("epochs are 1-indexed")
        factor = 0.1 if epoch > self.lr_decay_epoch else 1.0
        return self.lr_base * factor, self.lr_head * factor
