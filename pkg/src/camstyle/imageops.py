"""Image tensor conversions and resizing shared by the translation and re-ID paths."""

from __future__ import annotations

import numpy as np
import torch


def to_chw_tensor(images: np.ndarray, dtype: torch.dtype = torch.float32) -> torch.Tensor:
    """(N,H,W,3) or (H,W,3) float array in [0,1] -> torch (N,3,H,W)."""
    arr = np.asarray(images, dtype=np.float32)
    if arr.ndim == 3:
        arr = arr[None]
    if arr.ndim != 4 or arr.shape[-1] != 3:
        raise ValueError(f"expected (N,H,W,3) image array, got shape {arr.shape}")
    return torch.from_numpy(np.ascontiguousarray(arr.transpose(0, 3, 1, 2))).to(dtype)


def from_chw_tensor(batch: torch.Tensor) -> np.ndarray:
    """torch (N,3,H,W) -> (N,H,W,3) float32 array clipped to [0,1]."""
    arr = batch.detach().cpu().numpy().transpose(0, 2, 3, 1)
    return np.clip(arr, 0.0, 1.0).astype(np.float32)


def resize_image(image: np.ndarray, size: tuple[int, int]) -> np.ndarray:
    """Bilinear-resize one (H,W,3) image in [0,1] to (height, width).

    Uses a fixed interpolation recipe (bilinear, no antialias) so results are
    bit-stable across calls.
    """
    h, w = int(size[0]), int(size[1])
    if image.shape[0] == h and image.shape[1] == w:
        return np.asarray(image, dtype=np.float32)
    t = to_chw_tensor(image)
    out = torch.nn.functional.interpolate(t, size=(h, w), mode="bilinear", align_corners=False)
    return from_chw_tensor(out)[0]


def resize_batch(images: np.ndarray, size: tuple[int, int]) -> np.ndarray:
    """Resize (N,H,W,3) images in one shot."""
    h, w = int(size[0]), int(size[1])
    arr = np.asarray(images, dtype=np.float32)
    if arr.shape[1] == h and arr.shape[2] == w:
        return arr
    t = to_chw_tensor(arr)
    out = torch.nn.functional.interpolate(t, size=(h, w), mode="bilinear", align_corners=False)
    return from_chw_tensor(out)
