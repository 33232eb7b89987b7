"""Run configuration: JSON file format, defaults and validation."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Any

from additive_unet.errors import ConfigError
from additive_unet.harness.schema import validate_run_dict
from additive_unet.model import ModelConfig


def output_root() -> str:
    """Root for run directories; ``ADDUNET_OUTPUT_ROOT`` or ./runs."""
    return os.getenv("ADDUNET_OUTPUT_ROOT", "runs")


def _strict(cls, data: dict[str, Any], where: str) -> dict[str, Any]:
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be a JSON object")
    allowed = {f.name for f in fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} fields: {sorted(unknown)}")
    return dict(data)


@dataclass
class SynthSpec:
    """Synthetic image set used instead of a dataset directory."""

    count: int = 50
    height: int = 64
    width: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError(f"synth.count must be >= 1, got {self.count}")
        if self.height < 16 or self.width < 16:
            raise ConfigError(f"synth images must be at least 16x16, got {self.height}x{self.width}")

    @classmethod
    def from_dict(cls, data: dict[str, Any] | None) -> SynthSpec | None:
        if data is None:
            return None
        return cls(**_strict(cls, data, "synth"))


def _check_sigmas(sigmas: list[float], where: str, allow_zero: bool = False) -> list[float]:
    if not sigmas:
        raise ConfigError(f"{where}.sigma_list must not be empty")
    out = [float(s) for s in sigmas]
    bad = [s for s in out if s < 0 or (s == 0 and not allow_zero)]
    if bad:
        raise ConfigError(f"{where}.sigma_list has invalid noise levels {bad}")
    return out


@dataclass
class TrainConfig:
    """
    Training hyperparameters.

    Exactly one of `steps` or `epochs` drives the length of the run; `steps`
    wins when both are set. One epoch is one pass over every extracted patch
    times `realizations` noise draws.
    """

    steps: int | None = None
    epochs: int | None = 200
    batch_size: int = 4
    lr: float = 2e-4
    sigma_list: list[float] = field(default_factory=lambda: [25.0])
    patch_size: int = 128
    realizations: int = 2
    crops_per_image: int = 1
    seed: int = 0
    epsilon: float = 1e-3
    renoise_each_epoch: bool = True
    dataset_dir: str | None = None
    synth: SynthSpec | None = None
    checkpoint_every: int = 0
    log_every: int = 50

    def __post_init__(self):
        if isinstance(self.synth, dict):
            self.synth = SynthSpec.from_dict(self.synth)
        self.sigma_list = _check_sigmas(self.sigma_list, "train")
        if self.batch_size < 1:
            raise ConfigError(f"train.batch_size must be >= 1, got {self.batch_size}")
        if self.steps is None and self.epochs is None:
            raise ConfigError("train needs either steps or epochs")
        if self.steps is not None and self.steps < 0:
            raise ConfigError(f"train.steps must be >= 0, got {self.steps}")
        if self.epochs is not None and self.epochs < 0:
            raise ConfigError(f"train.epochs must be >= 0, got {self.epochs}")
        if not self.lr > 0:
            raise ConfigError(f"train.lr must be > 0, got {self.lr}")
        if self.realizations < 1 or self.crops_per_image < 1:
            raise ConfigError("train.realizations and train.crops_per_image must be >= 1")
        if not self.epsilon > 0:
            raise ConfigError(f"train.epsilon must be > 0, got {self.epsilon}")
        if self.patch_size < 1:
            raise ConfigError(f"train.patch_size must be >= 1, got {self.patch_size}")
        if self.dataset_dir is None and self.synth is None:
            raise ConfigError("train needs dataset_dir or synth")

    @property
    def sigma(self) -> float:
        if len(self.sigma_list) != 1:
            raise ConfigError(
                f"one noise level per training run, got sigma_list={self.sigma_list}; "
                "pass --sigma to pick one"
            )
        return self.sigma_list[0]

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TrainConfig:
        return cls(**_strict(cls, data, "train"))


@dataclass
class EvalConfig:
    """Evaluation images and noise levels; sigma 0 feeds clean images unchanged."""

    dataset_dir: str | None = None
    synth: SynthSpec | None = None
    sigma_list: list[float] = field(default_factory=lambda: [15.0, 25.0, 50.0])
    seed: int = 0
    write_images: bool = False
    include_noisy: bool = False

    def __post_init__(self):
        if isinstance(self.synth, dict):
            self.synth = SynthSpec.from_dict(self.synth)
        self.sigma_list = _check_sigmas(self.sigma_list, "eval", allow_zero=True)

    @property
    def has_images(self) -> bool:
        return self.dataset_dir is not None or self.synth is not None

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> EvalConfig:
        return cls(**_strict(cls, data, "eval"))


@dataclass
class RunConfig:
    """Complete description of one run: model, training, evaluation, outputs."""

    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=lambda: TrainConfig(synth=SynthSpec()))
    eval: EvalConfig = field(default_factory=EvalConfig)
    output_dir: str = ""
    name: str = "run"

    def __post_init__(self):
        if not self.output_dir:
            self.output_dir = os.path.join(output_root(), self.name)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunConfig:
        validate_run_dict(data)
        data = _strict(cls, data, "run config")
        try:
            return cls(
                model=ModelConfig.from_dict(data.get("model", {})),
                train=TrainConfig.from_dict(data.get("train", {})),
                eval=EvalConfig.from_dict(data.get("eval", {})),
                output_dir=data.get("output_dir", ""),
                name=data.get("name", "run"),
            )
        except TypeError as e:
            raise ConfigError(f"invalid config value: {e}")

    @classmethod
    def from_json(cls, path: str) -> RunConfig:
        if not os.path.isfile(path):
            raise ConfigError(f"config file not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})")
        return cls.from_dict(data)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "output_dir": self.output_dir,
            "model": self.model.to_dict(),
            "train": asdict(self.train),
            "eval": asdict(self.eval),
        }


def with_overrides(config: RunConfig, overrides: dict[str, Any]) -> RunConfig:
    """
    Return a copy of `config` with dotted-path overrides applied and validated.

    Example:
        >>> with_overrides(cfg, {"train.steps": 10, "train.sigma_list": [15]})
    """
    data = config.to_dict()
    explicit_output = "output_dir" in overrides and overrides["output_dir"] is not None
    for path, value in overrides.items():
        if value is None:
            continue
        node = data
        *parents, leaf = path.split(".")
        for key in parents:
            node = node.setdefault(key, {})
            if node is None:
                raise ConfigError(f"cannot override {path}: {key} is unset")
        node[leaf] = value
    if "name" in overrides and not explicit_output:
        data["output_dir"] = ""
    return RunConfig.from_dict(data)
