"""Training-time image augmentations: random flip+crop and random erasing.

Both operate on (H,W,3) float arrays in [0,1] and return new arrays; inputs
are never mutated. Evaluation-time images are resized only.
"""

from __future__ import annotations

import math

import numpy as np

ERASE_AREA_RANGE = (0.02, 0.4)
ERASE_ASPECT_MIN = 0.3
ERASE_MAX_ATTEMPTS = 100


def augment_flip_crop(image: np.ndarray, rng: np.random.Generator,
                      padding: int = 10) -> np.ndarray:
    """Horizontal flip with probability 0.5, then a random crop of the original
    size from a zero-padded enlargement."""
    img = np.asarray(image, dtype=np.float32)
    if rng.random() < 0.5:
        img = img[:, ::-1]
    h, w = img.shape[:2]
    padded = np.zeros((h + 2 * padding, w + 2 * padding, 3), dtype=np.float32)
    padded[padding:padding + h, padding:padding + w] = img
    top = int(rng.integers(0, 2 * padding + 1))
    left = int(rng.integers(0, 2 * padding + 1))
    return padded[top:top + h, left:left + w].copy()


def random_erasing(image: np.ndarray, p: float = 0.5,
                   area_range: tuple[float, float] = ERASE_AREA_RANGE,
                   aspect_range: tuple[float, float] | None = None,
                   rng: np.random.Generator | None = None) -> np.ndarray:
    """With probability p, overwrite one rectangle with random values.

    Rectangle area is drawn in image_area*[area_lo, area_hi] and aspect in
    [r, 1/r]; draws that round outside those bounds or off the image are
    retried, and after ERASE_MAX_ATTEMPTS the image is returned unmodified.
    """
    if rng is None:
        raise ValueError("random_erasing requires an explicit rng")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0,1], got {p}")
    lo, hi = area_range
    if not 0.0 < lo <= hi < 1.0:
        raise ValueError(f"area_range must satisfy 0 < lo <= hi < 1, got {area_range}")
    if aspect_range is None:
        aspect_range = (ERASE_ASPECT_MIN, 1.0 / ERASE_ASPECT_MIN)

    img = np.asarray(image, dtype=np.float32)
    if rng.random() >= p:
        return img.copy()
    h, w = img.shape[:2]
    area = h * w
    for _ in range(ERASE_MAX_ATTEMPTS):
        target = rng.uniform(lo, hi) * area
        aspect = rng.uniform(*aspect_range)
        eh = int(round(math.sqrt(target * aspect)))
        ew = int(round(math.sqrt(target / aspect)))
        if eh < 1 or ew < 1 or eh >= h or ew >= w:
            continue
        if not lo <= (eh * ew) / area <= hi:
            continue
        top = int(rng.integers(0, h - eh + 1))
        left = int(rng.integers(0, w - ew + 1))
        out = img.copy()
        out[top:top + eh, left:left + ew] = rng.uniform(
            0.0, 1.0, size=(eh, ew, img.shape[2])).astype(np.float32)
        return out
    return img.copy()
