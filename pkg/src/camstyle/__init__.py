"""Camera-style data augmentation lab for cross-camera person retrieval."""

__version__ = "0.1.0"
