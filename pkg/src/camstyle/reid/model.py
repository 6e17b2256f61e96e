"""Identity-classification model: backbone, pooled feature tap, FC-1024 head.

The head is Linear(feature_dim -> embed_dim) -> BatchNorm -> ReLU ->
Dropout -> Linear(embed_dim -> C). Retrieval uses the pooled backbone
feature (the "Pool-5" tap), not the classifier output.
"""

from __future__ import annotations

import logging

import torch
import torch.nn as nn

from camstyle.errors import ConfigError
from camstyle.reid.config import IdeConfig

logger = logging.getLogger(__name__)


class TinyBackbone(nn.Module):
    """Small strided CNN for desk-scale runs; feature width = width * 2**depth."""

    def __init__(self, width: int = 16, depth: int = 2):
        super().__init__()
        layers: list[nn.Module] = [
            nn.Conv2d(3, width, kernel_size=3, stride=1, padding=1),
            nn.BatchNorm2d(width),
            nn.ReLU(inplace=True),
        ]
        f = width
        for _ in range(depth):
            layers += [
                nn.Conv2d(f, f * 2, kernel_size=3, stride=2, padding=1),
                nn.BatchNorm2d(f * 2),
                nn.ReLU(inplace=True),
            ]
            f *= 2
        self.features = nn.Sequential(*layers)
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.out_dim = f

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.pool(self.features(x)).flatten(1)


class ResnetBackbone(nn.Module):
    """ResNet-50 trunk up to global average pooling (2048-dim)."""

    def __init__(self, pretrained: bool = False):
        super().__init__()
        from torchvision.models import resnet50

        weights = None
        if pretrained:
            try:
                from torchvision.models import ResNet50_Weights
                weights = ResNet50_Weights.IMAGENET1K_V1
            except Exception:  # pragma: no cover - torchvision API drift
                weights = None
        try:
            net = resnet50(weights=weights)
        except Exception as exc:
            logger.warning("pretrained weights unavailable (%s); using random init", exc)
            net = resnet50(weights=None)
        self.trunk = nn.Sequential(*list(net.children())[:-2])
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.out_dim = 2048

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.pool(self.trunk(x)).flatten(1)


class IdeModel(nn.Module):
    def __init__(self, config: IdeConfig):
        super().__init__()
        self.config = config
        if config.backbone == "tiny_cnn":
            self.backbone = TinyBackbone(config.tiny_width, config.tiny_depth)
        elif config.backbone == "reference_resnet50":
            self.backbone = ResnetBackbone(pretrained=config.pretrained_backbone)
        else:
            raise ConfigError(f"unknown backbone {config.backbone!r}")
        if self.backbone.out_dim != config.feature_dim:
            raise ConfigError("backbone feature width disagrees with config.feature_dim")
        self.head = nn.Sequential(
            nn.Linear(config.feature_dim, config.embed_dim),
            nn.BatchNorm1d(config.embed_dim),
            nn.ReLU(inplace=True),
            nn.Dropout(p=config.dropout_p),
            nn.Linear(config.embed_dim, config.num_classes),
        )

    def features(self, x: torch.Tensor) -> torch.Tensor:
        """Pooled backbone descriptor used for retrieval."""
        return self.backbone(x)

    def scores(self, x: torch.Tensor) -> torch.Tensor:
        """Pre-normalization class scores (for the loss)."""
        return self.head(self.features(x))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """Class probabilities (normalized exponential of the scores)."""
        return torch.softmax(self.scores(x), dim=1)

    def head_parameters(self):
        return self.head.parameters()

    def backbone_parameters(self):
        return self.backbone.parameters()


def build_ide(config: IdeConfig) -> IdeModel:
    return IdeModel(config)
