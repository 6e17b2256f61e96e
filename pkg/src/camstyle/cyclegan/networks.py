"""Generator and discriminator architectures for camera-pair translation.

The generator is the residual encoder-decoder (7x7 stem, strided
downsampling, residual blocks, transposed-conv upsampling, 7x7 head); the
discriminator is a patch classifier emitting a grid of realness scores with a
~70px receptive field at default depth. Both take and return images in
[0, 1]; the [-1, 1] tanh convention is internal.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from camstyle.cyclegan.config import CycleGANConfig
from camstyle.errors import ConfigError


def _norm(channels: int) -> nn.Module:
    return nn.InstanceNorm2d(channels, affine=False, track_running_stats=False)


class ResidualBlock(nn.Module):
    def __init__(self, channels: int):
        super().__init__()
        self.body = nn.Sequential(
            nn.ReflectionPad2d(1),
            nn.Conv2d(channels, channels, kernel_size=3),
            _norm(channels),
            nn.ReLU(inplace=True),
            nn.ReflectionPad2d(1),
            nn.Conv2d(channels, channels, kernel_size=3),
            _norm(channels),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x + self.body(x)


class ResnetGenerator(nn.Module):
    def __init__(self, base_filters: int = 64, residual_blocks: int = 9,
                 downsample_layers: int = 2):
        super().__init__()
        f = base_filters
        layers: list[nn.Module] = [
            nn.ReflectionPad2d(3),
            nn.Conv2d(3, f, kernel_size=7),
            _norm(f),
            nn.ReLU(inplace=True),
        ]
        for _ in range(downsample_layers):
            layers += [
                nn.Conv2d(f, f * 2, kernel_size=3, stride=2, padding=1),
                _norm(f * 2),
                nn.ReLU(inplace=True),
            ]
            f *= 2
        layers += [ResidualBlock(f) for _ in range(residual_blocks)]
        for _ in range(downsample_layers):
            layers += [
                nn.ConvTranspose2d(f, f // 2, kernel_size=3, stride=2, padding=1,
                                   output_padding=1),
                _norm(f // 2),
                nn.ReLU(inplace=True),
            ]
            f //= 2
        layers += [nn.ReflectionPad2d(3), nn.Conv2d(f, 3, kernel_size=7), nn.Tanh()]
        self.net = nn.Sequential(*layers)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return (self.net(x * 2.0 - 1.0) + 1.0) / 2.0


class PatchDiscriminator(nn.Module):
    def __init__(self, base_filters: int = 64, n_layers: int = 3):
        super().__init__()
        f = base_filters
        layers: list[nn.Module] = [
            nn.Conv2d(3, f, kernel_size=4, stride=2, padding=1),
            nn.LeakyReLU(0.2, inplace=True),
        ]
        for i in range(1, n_layers):
            layers += [
                nn.Conv2d(f, f * 2, kernel_size=4, stride=2, padding=1),
                _norm(f * 2),
                nn.LeakyReLU(0.2, inplace=True),
            ]
            f *= 2
        layers += [
            nn.Conv2d(f, f * 2, kernel_size=4, stride=1, padding=1),
            _norm(f * 2),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(f * 2, 1, kernel_size=4, stride=1, padding=1),
        ]
        self.net = nn.Sequential(*layers)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(x * 2.0 - 1.0)


def init_weights(module: nn.Module, std: float = 0.02) -> None:
    """Gaussian(0, 0.02) conv init, the standard translation-GAN scheme."""
    for m in module.modules():
        if isinstance(m, (nn.Conv2d, nn.ConvTranspose2d)):
            nn.init.normal_(m.weight, 0.0, std)
            if m.bias is not None:
                nn.init.zeros_(m.bias)


def build_generator(config: CycleGANConfig) -> ResnetGenerator:
    """Image-to-image map at the configured square size; output stays in [0,1]."""
    factor = 2 ** config.downsample_layers
    if config.image_size % factor != 0:
        raise ConfigError(
            f"image_size {config.image_size} not divisible by the "
            f"down/upsampling factor {factor}")
    gen = ResnetGenerator(base_filters=config.base_filters,
                          residual_blocks=config.residual_blocks,
                          downsample_layers=config.downsample_layers)
    init_weights(gen)
    return gen


def build_discriminator(config: CycleGANConfig) -> PatchDiscriminator:
    """Patch score grid over the image; >1 spatial cell at the default size."""
    disc = PatchDiscriminator(base_filters=config.disc_filters,
                              n_layers=config.disc_layers)
    init_weights(disc)
    return disc
