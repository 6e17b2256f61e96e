from camstyle.reid.augment import augment_flip_crop, random_erasing
from camstyle.reid.config import IdeConfig
from camstyle.reid.features import load_features, save_features
from camstyle.reid.model import IdeModel, build_ide
from camstyle.reid.train import (
    MixedBatchCriterion,
    TrainingReport,
    extract_features,
    load_ide,
    prepare_images,
    save_ide,
    train_reid,
)

__all__ = [
    "IdeConfig",
    "IdeModel",
    "build_ide",
    "augment_flip_crop",
    "random_erasing",
    "MixedBatchCriterion",
    "TrainingReport",
    "train_reid",
    "extract_features",
    "prepare_images",
    "save_ide",
    "load_ide",
    "save_features",
    "load_features",
]
