"""Architecture descriptor shared by every model variant."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from additive_unet.errors import ConfigError


class Variant(str, Enum):
    """Model family."""

    REAL_ADDITIVE = "real_additive"
    PSEUDO_ADDITIVE = "pseudo_additive"
    DNCNN = "dncnn"


# Kernel schedules studied for the additive U-Net.
KERNEL_SCHEDULES: dict[str, list[int]] = {
    "3-3-3-3-3": [3, 3, 3, 3, 3],
    "5-5-5-5-5": [5, 5, 5, 5, 5],
    "9-7-5-3-1": [9, 7, 5, 3, 1],
    "1-3-5-7-9": [1, 3, 5, 7, 9],
    "3-3-3": [3, 3, 3],
}

DNCNN_KERNEL = 3

_SHORT_NAMES = {
    Variant.REAL_ADDITIVE: "R-AddU",
    Variant.PSEUDO_ADDITIVE: "P-AddU",
}


@dataclass
class ModelConfig:
    """
    Configuration for a denoising network.

    Attributes:
        variant: Which network family to build.
        depth: Number of encoder (and decoder) blocks L for the U-Nets; total
            convolution count for DnCNN.
        channels: Feature width C, constant through the network.
        kernel_schedule: Per-block kernel sizes k_1..k_L (U-Nets only).
        seed: Seed for weight initialization.
    """

    variant: Variant = Variant.REAL_ADDITIVE
    depth: int = 5
    channels: int = 64
    kernel_schedule: list[int] = field(default_factory=lambda: [3, 3, 3, 3, 3])
    seed: int = 0

    def __post_init__(self):
        try:
            self.variant = Variant(self.variant)
        except ValueError:
            choices = ", ".join(v.value for v in Variant)
            raise ConfigError(f"unknown model variant {self.variant!r} (choose {choices})")
        if not isinstance(self.depth, int) or self.depth < 1:
            raise ConfigError(f"model.depth must be a positive integer, got {self.depth!r}")
        if not isinstance(self.channels, int) or self.channels < 1:
            raise ConfigError(f"model.channels must be a positive integer, got {self.channels!r}")
        self.kernel_schedule = [int(k) for k in self.kernel_schedule]

        if self.variant is Variant.DNCNN:
            if self.depth < 2:
                raise ConfigError("DnCNN needs at least two layers")
            self.kernel_schedule = [DNCNN_KERNEL] * self.depth
            return

        if len(self.kernel_schedule) != self.depth:
            raise ConfigError(
                f"kernel_schedule has {len(self.kernel_schedule)} entries but depth is {self.depth}"
            )
        bad = [k for k in self.kernel_schedule if k < 1 or k % 2 == 0]
        if bad:
            raise ConfigError(f"kernel sizes must be odd and >= 1, got {bad}")

    @property
    def is_unet(self) -> bool:
        return self.variant is not Variant.DNCNN

    @property
    def is_gated(self) -> bool:
        return self.variant is Variant.REAL_ADDITIVE

    @property
    def max_kernel(self) -> int:
        return max(self.kernel_schedule)

    @property
    def label(self) -> str:
        """Row label in the style of the results table, e.g. ``R-AddU (5, 3-3-3-3-3)``."""
        if self.variant is Variant.DNCNN:
            return f"DnCNN-{self.depth}"
        kernels = "-".join(str(k) for k in self.kernel_schedule)
        return f"{_SHORT_NAMES[self.variant]} ({self.depth}, {kernels})"

    def to_dict(self) -> dict[str, Any]:
        return {
            "variant": self.variant.value,
            "depth": self.depth,
            "channels": self.channels,
            "kernel_schedule": list(self.kernel_schedule),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ModelConfig":
        unknown = set(data) - {"variant", "depth", "channels", "kernel_schedule", "seed"}
        if unknown:
            raise ConfigError(f"unknown model fields: {sorted(unknown)}")
        data = dict(data)
        if data.get("variant") == Variant.DNCNN.value:
            data.setdefault("depth", 17)
            data.setdefault("kernel_schedule", [])
        return cls(**data)
