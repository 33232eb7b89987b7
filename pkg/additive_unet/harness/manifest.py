"""Run manifests: what was run, with which code, and what came out."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from typing import Any

from additive_unet import __version__
from additive_unet.errors import DataError
from additive_unet.metrics import Aggregate
from additive_unet.run_logger import config_digest

MANIFEST_FILE = "manifest.json"


@dataclass
class RunManifest:
    """
    Record of a train or eval run.

    `config` is the full configuration snapshot; together with `code_version`
    it reproduces the run bit for bit.
    """

    command: str
    config: dict[str, Any]
    code_version: str = __version__
    config_digest: str = ""
    wall_clock_seconds: float = 0.0
    final_metrics: list[dict[str, Any]] = field(default_factory=list)
    checkpoint: str | None = None
    loss_log: str | None = None
    gates: list[float] | None = None
    steps_completed: int = 0
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.config_digest:
            self.config_digest = config_digest(self.config)

    def aggregates(self) -> list[Aggregate]:
        return [
            Aggregate(
                model_id=m["model_id"],
                sigma=float(m["sigma"]),
                psnr_db=float(m["psnr_db"]),
                ssim=float(m["ssim"]),
                count=int(m.get("count", 0)),
            )
            for m in self.final_metrics
        ]

    def write(self, path: str) -> str:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(asdict(self), f, indent=2, sort_keys=True)
        return path

    @classmethod
    def read(cls, path: str) -> RunManifest:
        if os.path.isdir(path):
            path = os.path.join(path, MANIFEST_FILE)
        if not os.path.isfile(path):
            raise DataError(f"manifest not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
            return cls(**data)
        except (json.JSONDecodeError, TypeError) as e:
            raise DataError(f"{path}: malformed manifest ({e})")


def metrics_entries(aggregates: list[Aggregate]) -> list[dict[str, Any]]:
    # inf is kept as a float; json writes it as Infinity and reads it back
    return [asdict(a) for a in aggregates]
