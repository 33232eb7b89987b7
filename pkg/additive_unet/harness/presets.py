"""Shipped run configurations."""

from __future__ import annotations

import copy
from typing import Any

from additive_unet.errors import ConfigError
from additive_unet.harness.config import RunConfig
from additive_unet.model import KERNEL_SCHEDULES

_FULL_TRAIN: dict[str, Any] = {
    "epochs": 200,
    "batch_size": 4,
    "lr": 2e-4,
    "sigma_list": [25.0],
    "patch_size": 128,
    "realizations": 2,
    "crops_per_image": 1,
    "seed": 0,
    "epsilon": 1e-3,
    "renoise_each_epoch": True,
    "dataset_dir": "data/train",
    "checkpoint_every": 1000,
    "log_every": 100,
}

_FULL_EVAL: dict[str, Any] = {
    "dataset_dir": "data/kodak",
    "sigma_list": [15.0, 25.0, 50.0],
    "seed": 0,
}

PRESETS: dict[str, dict[str, Any]] = {
    # Memorize one 32x32 synthetic patch with a fixed noise draw.
    "preset-overfit": {
        "model": {
            "variant": "real_additive",
            "depth": 3,
            "channels": 8,
            "kernel_schedule": [3, 3, 3],
            "seed": 0,
        },
        "train": {
            "steps": 2000,
            "epochs": None,
            "batch_size": 1,
            "lr": 1e-3,
            "sigma_list": [25.0],
            "patch_size": 32,
            "realizations": 1,
            "crops_per_image": 1,
            "renoise_each_epoch": False,
            "synth": {"count": 1, "height": 32, "width": 32, "seed": 0},
            "log_every": 200,
        },
        "eval": {"sigma_list": [25.0]},
    },
    # Desk-scale denoising: 50 synthetic images x 4 crops = 200 patches.
    "preset-smoke": {
        "model": {
            "variant": "real_additive",
            "depth": 3,
            "channels": 16,
            "kernel_schedule": [3, 3, 3],
            "seed": 0,
        },
        "train": {
            "steps": None,
            "epochs": 10,
            "batch_size": 4,
            "lr": 1e-3,
            "sigma_list": [25.0],
            "patch_size": 32,
            "realizations": 2,
            "crops_per_image": 4,
            "synth": {"count": 50, "height": 64, "width": 64, "seed": 0},
            "log_every": 100,
        },
        "eval": {
            "synth": {"count": 8, "height": 64, "width": 64, "seed": 1},
            "sigma_list": [25.0],
        },
    },
    "preset-paper": {
        "model": {
            "variant": "real_additive",
            "depth": 5,
            "channels": 64,
            "kernel_schedule": [3, 3, 3, 3, 3],
            "seed": 0,
        },
        "train": _FULL_TRAIN,
        "eval": _FULL_EVAL,
    },
}

# Results-table rows: every kernel schedule plus both baselines.
for _schedule_name, _schedule in KERNEL_SCHEDULES.items():
    PRESETS[f"full-radd-{_schedule_name}"] = {
        "model": {
            "variant": "real_additive",
            "depth": len(_schedule),
            "channels": 64,
            "kernel_schedule": list(_schedule),
            "seed": 0,
        },
        "train": _FULL_TRAIN,
        "eval": _FULL_EVAL,
    }
PRESETS["full-padd-3-3-3-3-3"] = {
    "model": {
        "variant": "pseudo_additive",
        "depth": 5,
        "channels": 64,
        "kernel_schedule": [3, 3, 3, 3, 3],
        "seed": 0,
    },
    "train": _FULL_TRAIN,
    "eval": _FULL_EVAL,
}
PRESETS["full-dncnn-17"] = {
    "model": {"variant": "dncnn", "depth": 17, "channels": 64, "seed": 0},
    "train": _FULL_TRAIN,
    "eval": _FULL_EVAL,
}


def list_presets() -> list[str]:
    return sorted(PRESETS)


def load_preset(name: str) -> RunConfig:
    """Build the RunConfig for a named preset."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r} (available: {', '.join(list_presets())})")
    data = copy.deepcopy(PRESETS[name])
    data["name"] = name
    return RunConfig.from_dict(data)
