"""Camera-labeled image datasets.

Holds the record/dataset types, a loader for the standard on-disk layout
(``bounding_box_train`` / ``query`` / ``bounding_box_test`` with
``{pid}_c{cam}...`` filenames), a seeded synthetic multi-camera generator for
desk-scale experiments, and camera-subset restriction for few-camera systems.

Images are stored as float32 ``(H, W, 3)`` arrays in ``[0, 1]``; resizing to a
model-specific resolution happens at consumption time, so storage stays
resolution-neutral.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from matplotlib.colors import hsv_to_rgb, rgb_to_hsv
from PIL import Image
from scipy.ndimage import gaussian_filter

from camstyle.errors import ConfigError, DatasetError

ROLES = ("train", "query", "gallery")
ORIGINS = ("real", "fake")

# pid may be negative (junk/distractor); camera digits follow "_c".
FILENAME_RE = re.compile(r"^(-?\d+)_c(\d+)")

IMAGE_SUFFIXES = (".jpg", ".jpeg", ".png", ".bmp")

SPLIT_DIRS = {"train": "bounding_box_train", "query": "query", "gallery": "bounding_box_test"}


@dataclass
class ImageRecord:
    """One image with identity, camera, and split metadata.

    ``identity`` is a dense non-negative class label for train records; junk
    records (distractor pid -1, junk pid 0) keep their raw pid and carry
    ``junk=True``. Fakes record which camera their source image came from.
    """

    pixels: np.ndarray
    identity: int
    camera: int
    role: str
    origin: str = "real"
    source_camera: int | None = None
    junk: bool = False
    raw_identity: int | None = None
    path: str | None = None

    def __post_init__(self) -> None:
        self.pixels = np.asarray(self.pixels, dtype=np.float32)
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise DatasetError(f"pixels must be (H,W,3), got shape {self.pixels.shape}")
        lo, hi = float(self.pixels.min()), float(self.pixels.max())
        if lo < 0.0 or hi > 1.0:
            raise DatasetError(f"pixel values outside [0,1]: min={lo}, max={hi}")
        if self.role not in ROLES:
            raise DatasetError(f"unknown role {self.role!r}")
        if self.origin not in ORIGINS:
            raise DatasetError(f"unknown origin {self.origin!r}")
        if self.origin == "fake":
            if self.source_camera is None:
                raise DatasetError("fake record must carry source_camera")
            if self.source_camera == self.camera:
                raise DatasetError("fake record must change camera (source == target)")
        if not self.junk and self.identity < 0:
            raise DatasetError(f"negative identity {self.identity} on a non-junk record")


@dataclass(frozen=True)
class CameraDataset:
    """Ordered records plus camera-set and train-class metadata."""

    records: tuple[ImageRecord, ...]
    cameras: frozenset[int]
    num_classes: int
    name: str

    @classmethod
    def from_records(cls, records: Sequence[ImageRecord], name: str,
                     cameras: Iterable[int] | None = None) -> "CameraDataset":
        records = tuple(records)
        cams = frozenset(int(c) for c in cameras) if cameras is not None else frozenset(
            r.camera for r in records)
        for r in records:
            if r.camera not in cams:
                raise DatasetError(
                    f"record camera {r.camera} not in declared camera set {sorted(cams)}")
        num_classes = len({r.identity for r in records if r.role == "train" and not r.junk})
        return cls(records=records, cameras=cams, num_classes=num_classes, name=name)

    def by_role(self, role: str) -> list[ImageRecord]:
        if role not in ROLES:
            raise DatasetError(f"unknown role {role!r}")
        return [r for r in self.records if r.role == role]

    @property
    def train(self) -> list[ImageRecord]:
        return self.by_role("train")

    @property
    def query(self) -> list[ImageRecord]:
        return self.by_role("query")

    @property
    def gallery(self) -> list[ImageRecord]:
        return self.by_role("gallery")

    @property
    def num_cameras(self) -> int:
        return len(self.cameras)


@dataclass(frozen=True)
class CameraStyle:
    """Per-camera appearance signature applied by the synthetic generator."""

    hue_shift: float
    gamma: float
    blur_radius: float
    noise_sigma: float


@dataclass(frozen=True)
class SynthConfig:
    """Recipe for a deterministic synthetic multi-camera dataset.

    Held-out test identities (``num_test_identities``, defaulting to
    ``num_identities``) are rendered the same way and split into one query
    image plus ``images_per_identity_per_camera`` gallery images per camera.
    """

    num_cameras: int
    num_identities: int
    images_per_identity_per_camera: int
    image_size: tuple[int, int] = (64, 64)
    style_params: tuple[CameraStyle, ...] | None = None
    seed: int = 0
    num_test_identities: int | None = None

    def __post_init__(self) -> None:
        if self.num_cameras < 2:
            raise ConfigError("need at least 2 cameras (cross-camera retrieval undefined)")
        if self.num_identities < 1 or self.images_per_identity_per_camera < 1:
            raise ConfigError("identity and per-camera image counts must be >= 1")
        if self.num_test_identities is not None and self.num_test_identities < 1:
            raise ConfigError("num_test_identities must be >= 1")
        if len(self.image_size) != 2 or min(self.image_size) < 8:
            raise ConfigError(f"image_size must be (H,W) with sides >= 8, got {self.image_size}")
        styles = self.styles()
        if len(styles) != self.num_cameras:
            raise ConfigError(
                f"{len(styles)} style tuples for {self.num_cameras} cameras")
        if len(set(styles)) != len(styles):
            raise ConfigError("per-camera style tuples must be pairwise distinct")

    def styles(self) -> tuple[CameraStyle, ...]:
        if self.style_params is not None:
            return tuple(self.style_params)
        return default_styles(self.num_cameras)

    @property
    def test_identities(self) -> int:
        return self.num_test_identities if self.num_test_identities is not None else self.num_identities


def default_styles(num_cameras: int) -> tuple[CameraStyle, ...]:
    """Spread of visibly distinct camera signatures (hue, gamma, blur, noise)."""
    styles = []
    for k in range(num_cameras):
        t = k / (num_cameras - 1)
        styles.append(CameraStyle(
            hue_shift=round(0.42 * t, 4),
            gamma=round(0.55 + 1.35 * t, 4),
            blur_radius=round(0.9 * t, 4),
            noise_sigma=round(0.01 + 0.02 * t, 4),
        ))
    return tuple(styles)


def apply_camera_style(image: np.ndarray, style: CameraStyle,
                       rng: np.random.Generator) -> np.ndarray:
    """Apply one camera's signature: hue rotation, gamma, blur, sensor noise."""
    out = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    if style.hue_shift:
        hsv = rgb_to_hsv(out)
        hsv[..., 0] = (hsv[..., 0] + style.hue_shift) % 1.0
        out = hsv_to_rgb(hsv)
    if style.gamma != 1.0:
        out = out ** style.gamma
    if style.blur_radius > 0:
        out = gaussian_filter(out, sigma=(style.blur_radius, style.blur_radius, 0.0))
    if style.noise_sigma > 0:
        out = out + rng.normal(0.0, style.noise_sigma, size=out.shape)
    return np.clip(out, 0.0, 1.0).astype(np.float32)


def _identity_palette(identity: int, seed: int) -> dict:
    """Stable per-identity appearance: band colors, band split points, one blob."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x1D, identity]))
    return {
        "bg": rng.uniform(0.05, 0.95, size=3),
        "bands": rng.uniform(0.05, 0.95, size=(3, 3)),
        "splits": np.sort(rng.uniform(0.2, 0.8, size=2)),
        "blob": (rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8), rng.uniform(0.08, 0.18),
                 rng.uniform(0.05, 0.95, size=3)),
    }


def render_identity(identity: int, size: tuple[int, int], seed: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Render one un-styled instance of an identity's procedural pattern.

    The pattern (3 horizontal color bands on a background, plus a blob) is a
    pure function of (seed, identity); ``rng`` only drives small per-instance
    jitter so the identity signal stays recoverable by a small CNN.
    """
    h, w = size
    pal = _identity_palette(identity, seed)
    img = np.empty((h, w, 3), dtype=np.float64)
    img[:] = pal["bg"]

    jitter = rng.uniform(-0.05, 0.05, size=2)
    s1 = int(np.clip((pal["splits"][0] + jitter[0]) * h, 1, h - 2))
    s2 = int(np.clip((pal["splits"][1] + jitter[1]) * h, s1 + 1, h - 1))
    margin = max(1, w // 8)
    img[0:s1, margin:w - margin] = pal["bands"][0]
    img[s1:s2, margin:w - margin] = pal["bands"][1]
    img[s2:h, margin:w - margin] = pal["bands"][2]

    cy, cx, radius, color = pal["blob"]
    yy, xx = np.mgrid[0:h, 0:w]
    mask = ((yy / h - cy) ** 2 + (xx / w - cx) ** 2) < radius ** 2
    img[mask] = color

    img = img + rng.normal(0.0, 0.02, size=img.shape)
    return np.clip(img, 0.0, 1.0)


def synth_generate(config: SynthConfig) -> CameraDataset:
    """Build a deterministic synthetic dataset per the config (pure in the seed).

    Train: ``num_identities`` identities, each photographed by every camera
    ``images_per_identity_per_camera`` times. Test: held-out identities with
    one query image and ``images_per_identity_per_camera`` gallery images per
    camera.
    """
    styles = config.styles()
    cameras = list(range(1, config.num_cameras + 1))
    records: list[ImageRecord] = []

    def make(identity: int, camera: int, role: str, instance: int) -> ImageRecord:
        role_code = ROLES.index(role)
        rng = np.random.default_rng(
            np.random.SeedSequence([config.seed, role_code, identity, camera, instance]))
        base = render_identity(identity, config.image_size, config.seed, rng)
        styled = apply_camera_style(base, styles[camera - 1], rng)
        return ImageRecord(pixels=styled, identity=identity, camera=camera, role=role,
                           raw_identity=identity)

    for identity in range(config.num_identities):
        for camera in cameras:
            for j in range(config.images_per_identity_per_camera):
                records.append(make(identity, camera, "train", j))

    first_test = config.num_identities
    for identity in range(first_test, first_test + config.test_identities):
        for camera in cameras:
            records.append(make(identity, camera, "query", 0))
            for j in range(config.images_per_identity_per_camera):
                records.append(make(identity, camera, "gallery", j + 1))

    return CameraDataset.from_records(records, name=f"synth-L{config.num_cameras}",
                                      cameras=cameras)


def parse_image_filename(name: str) -> tuple[int, int]:
    """``0002_c1s1_000451_03.jpg`` -> (identity 2, camera 1). Raises on mismatch."""
    m = FILENAME_RE.match(name)
    if not m:
        raise DatasetError(f"unparsable filename: {name!r}")
    return int(m.group(1)), int(m.group(2))


def parse_image_dir(directory: Path | str, role: str) -> list[ImageRecord]:
    """Load every image in one split directory, sorted by filename."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DatasetError(f"missing {role} directory: {directory}")
    records = []
    bad: list[str] = []
    for p in sorted(directory.iterdir()):
        if p.suffix.lower() not in IMAGE_SUFFIXES:
            continue
        try:
            pid, cam = parse_image_filename(p.name)
        except DatasetError:
            bad.append(p.name)
            continue
        with Image.open(p) as im:
            pixels = np.asarray(im.convert("RGB"), dtype=np.float32) / 255.0
        junk = pid in (-1, 0)
        records.append(ImageRecord(pixels=pixels, identity=pid, camera=cam, role=role,
                                   junk=junk, raw_identity=pid, path=str(p)))
    if bad:
        raise DatasetError(f"unparsable filenames in {directory}: {bad}")
    return records


def _densify_train_identities(records: list[ImageRecord]) -> list[ImageRecord]:
    """Map non-junk train identities bijectively onto 0..C-1 (sorted raw id order)."""
    train_ids = sorted({r.identity for r in records if r.role == "train" and not r.junk})
    mapping = {pid: i for i, pid in enumerate(train_ids)}
    out = []
    for r in records:
        if r.role == "train" and not r.junk:
            out.append(replace(r, identity=mapping[r.identity],
                               raw_identity=r.raw_identity if r.raw_identity is not None else r.identity))
        else:
            out.append(r)
    return out


def load_market_format(root_dir: Path | str) -> CameraDataset:
    """Load a dataset laid out in the standard directory convention.

    Expects ``bounding_box_train``, ``query`` and ``bounding_box_test`` under
    ``root_dir``. Junk/distractor records (pid 0 / -1) are retained in the
    gallery with their junk flag set; the evaluation protocol decides their
    treatment.
    """
    root = Path(root_dir)
    if not root.is_dir():
        raise DatasetError(f"dataset root does not exist: {root}")
    records: list[ImageRecord] = []
    for role, sub in SPLIT_DIRS.items():
        records.extend(parse_image_dir(root / sub, role))
    if not any(r.role == "train" for r in records):
        raise DatasetError(f"no train records under {root / SPLIT_DIRS['train']}")
    records = _densify_train_identities(records)
    return CameraDataset.from_records(records, name=root.name)


def restrict_cameras(dataset: CameraDataset, keep: Iterable[int]) -> CameraDataset:
    """Restrict every split to a camera subset; re-index train classes densely."""
    keep_set = frozenset(int(c) for c in keep)
    if not keep_set <= dataset.cameras:
        raise DatasetError(
            f"keep set {sorted(keep_set)} not a subset of cameras {sorted(dataset.cameras)}")
    if len(keep_set) < 2:
        raise DatasetError("need at least 2 cameras (cross-camera retrieval undefined)")
    kept = [r for r in dataset.records if r.camera in keep_set]
    kept = _densify_train_identities(kept)
    return CameraDataset.from_records(
        kept, name=f"{dataset.name}/cams{''.join(str(c) for c in sorted(keep_set))}",
        cameras=keep_set)


def export_market_format(dataset: CameraDataset, root_dir: Path | str,
                         force: bool = False) -> Path:
    """Write a dataset back out in the standard directory layout (PNG files)."""
    root = Path(root_dir)
    if root.exists() and any(root.iterdir()) and not force:
        raise FileExistsError(f"refusing to overwrite non-empty {root} (pass force=True)")
    for role, sub in SPLIT_DIRS.items():
        split_dir = root / sub
        split_dir.mkdir(parents=True, exist_ok=True)
        for i, rec in enumerate(dataset.by_role(role)):
            pid = rec.raw_identity if rec.raw_identity is not None else rec.identity
            pid_str = f"{pid:04d}" if pid >= 0 else str(pid)
            name = f"{pid_str}_c{rec.camera}s1_{i:06d}_00.png"
            save_image(rec.pixels, split_dir / name)
    meta = {"name": dataset.name, "cameras": sorted(dataset.cameras),
            "num_classes": dataset.num_classes}
    (root / "dataset.json").write_text(json.dumps(meta, indent=2))
    return root


def save_image(pixels: np.ndarray, path: Path | str) -> None:
    arr = np.clip(np.asarray(pixels, dtype=np.float32), 0.0, 1.0)
    Image.fromarray((arr * 255.0).round().astype(np.uint8)).save(path)
