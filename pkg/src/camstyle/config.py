"""Experiment configuration: one nested key/value file, overridable by flags.

Configs are YAML; ``--set a.b=c`` dotted overrides win over the file. The
top-level seed propagates into every stochastic sub-config that does not pin
its own.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import yaml

from camstyle.cyclegan import CycleGANConfig
from camstyle.data import (
    CameraDataset,
    CameraStyle,
    SynthConfig,
    load_market_format,
    restrict_cameras,
    synth_generate,
)
from camstyle.errors import ConfigError
from camstyle.losses import LossConfig
from camstyle.reid import IdeConfig
from camstyle.sampler import BatchSpec


@dataclass(frozen=True)
class DatasetSpec:
    kind: str = "synth"
    market_root: str | None = None
    synth: SynthConfig = field(default_factory=lambda: SynthConfig(
        num_cameras=2, num_identities=20, images_per_identity_per_camera=4))

    def __post_init__(self) -> None:
        if self.kind not in ("synth", "market"):
            raise ConfigError(f"dataset kind must be synth|market, got {self.kind!r}")
        if self.kind == "market" and not self.market_root:
            raise ConfigError("market dataset requires market_root")


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    dataset: DatasetSpec = field(default_factory=DatasetSpec)
    cameras: tuple[int, ...] | None = None
    cyclegan: CycleGANConfig = field(default_factory=CycleGANConfig)
    ide: IdeConfig = field(default_factory=IdeConfig)
    batch: BatchSpec = field(default_factory=BatchSpec)
    loss: LossConfig = field(default_factory=LossConfig)
    eval_ks: tuple[int, ...] = (1, 5, 10)


def desk_config(seed: int = 0) -> ExperimentConfig:
    """Laptop-scale defaults: tiny synthetic 2-camera system, tiny models."""
    return ExperimentConfig(
        seed=seed,
        dataset=DatasetSpec(kind="synth", synth=SynthConfig(
            num_cameras=2, num_identities=20, images_per_identity_per_camera=4,
            image_size=(64, 64), seed=seed)),
        cyclegan=CycleGANConfig(
            residual_blocks=2, image_size=64, base_filters=16, disc_filters=16,
            epochs_constant=5, epochs_decay=5, seed=seed),
        ide=IdeConfig(
            backbone="tiny_cnn", num_classes=20, embed_dim=64, input_size=(64, 32),
            lr_decay_epoch=8, total_epochs=10, batch_size=32, seed=seed),
        batch=BatchSpec(batch_size=32, ratio_real=3, ratio_fake=1, seed=seed),
        loss=LossConfig(),
    )


_SECTION_TYPES = {
    "dataset": DatasetSpec,
    "cyclegan": CycleGANConfig,
    "ide": IdeConfig,
    "batch": BatchSpec,
    "loss": LossConfig,
}

_TUPLE_FIELDS = {"image_size", "input_size", "cameras", "eval_ks"}


def _coerce(cls: type, values: dict[str, Any], seed: int | None) -> Any:
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(values) - names
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    kwargs = dict(values)
    if cls is SynthConfig and kwargs.get("style_params") is not None:
        kwargs["style_params"] = tuple(
            CameraStyle(**s) if isinstance(s, dict) else CameraStyle(*s)
            for s in kwargs["style_params"])
    for key in list(kwargs):
        if key in _TUPLE_FIELDS and isinstance(kwargs[key], (list, tuple)):
            kwargs[key] = tuple(kwargs[key])
    if seed is not None and "seed" in names and "seed" not in kwargs:
        kwargs["seed"] = seed
    return cls(**kwargs)


def config_from_dict(raw: dict[str, Any]) -> ExperimentConfig:
    raw = dict(raw or {})
    seed = int(raw.pop("seed", 0))
    kwargs: dict[str, Any] = {"seed": seed}
    for section, cls in _SECTION_TYPES.items():
        if section not in raw:
            continue
        values = dict(raw.pop(section) or {})
        if section == "dataset":
            synth_values = values.pop("synth", None)
            if synth_values is not None:
                values["synth"] = _coerce(SynthConfig, dict(synth_values), seed)
            kwargs[section] = DatasetSpec(**values)
        else:
            kwargs[section] = _coerce(cls, values, seed)
    if "cameras" in raw:
        cams = raw.pop("cameras")
        kwargs["cameras"] = tuple(int(c) for c in cams) if cams is not None else None
    if "eval_ks" in raw:
        kwargs["eval_ks"] = tuple(int(k) for k in raw.pop("eval_ks"))
    if raw:
        raise ConfigError(f"unknown top-level config keys: {sorted(raw)}")
    return ExperimentConfig(**kwargs)


def apply_overrides(raw: dict[str, Any], overrides: Sequence[str]) -> dict[str, Any]:
    """Apply ``a.b.c=value`` assignments (YAML-parsed values) onto a config dict."""
    out = dict(raw or {})
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        dotted, value = item.split("=", 1)
        keys = dotted.strip().split(".")
        node = out
        for k in keys[:-1]:
            node = node.setdefault(k, {})
            if not isinstance(node, dict):
                raise ConfigError(f"cannot descend into non-mapping key {k!r} of {dotted!r}")
        node[keys[-1]] = yaml.safe_load(value)
    return out


def load_config(path: Path | str | None, overrides: Sequence[str] = ()) -> ExperimentConfig:
    """Read the YAML config (desk defaults when path is None), apply overrides."""
    if path is None:
        raw = _to_raw(desk_config())
    else:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file does not exist: {path}")
        raw = yaml.safe_load(path.read_text()) or {}
        if not isinstance(raw, dict):
            raise ConfigError(f"config root must be a mapping, got {type(raw).__name__}")
    raw = apply_overrides(raw, overrides)
    return config_from_dict(raw)


def _to_raw(cfg: ExperimentConfig) -> dict[str, Any]:
    from camstyle.utils import to_jsonable

    return to_jsonable(cfg)


def load_dataset(cfg: ExperimentConfig) -> CameraDataset:
    if cfg.dataset.kind == "market":
        dataset = load_market_format(cfg.dataset.market_root)
    else:
        dataset = synth_generate(cfg.dataset.synth)
    if cfg.cameras is not None:
        dataset = restrict_cameras(dataset, cfg.cameras)
    return dataset
