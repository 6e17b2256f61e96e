from camstyle.cyclegan.config import CycleGANConfig
from camstyle.cyclegan.networks import build_discriminator, build_generator
from camstyle.cyclegan.objectives import (
    PairNets,
    adversarial_loss,
    cycle_consistency_loss,
    identity_mapping_loss,
    total_objective,
)
from camstyle.cyclegan.training import (
    CameraPairModel,
    ImagePool,
    load_pair,
    lr_at_epoch,
    lr_factor,
    save_pair,
    train_pair,
)

__all__ = [
    "CycleGANConfig",
    "build_generator",
    "build_discriminator",
    "PairNets",
    "adversarial_loss",
    "cycle_consistency_loss",
    "identity_mapping_loss",
    "total_objective",
    "CameraPairModel",
    "ImagePool",
    "train_pair",
    "save_pair",
    "load_pair",
    "lr_factor",
    "lr_at_epoch",
]
