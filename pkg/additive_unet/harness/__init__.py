"""Run configuration, presets, manifests and the command implementations."""

from additive_unet.harness.config import (
    EvalConfig,
    RunConfig,
    SynthSpec,
    TrainConfig,
    output_root,
    with_overrides,
)
from additive_unet.harness.evaluate import cmd_denoise, cmd_eval, cmd_fetch_dataset
from additive_unet.harness.inspect import cmd_spectra, cmd_sweep_alpha
from additive_unet.harness.manifest import MANIFEST_FILE, RunManifest
from additive_unet.harness.presets import PRESETS, list_presets, load_preset
from additive_unet.harness.schema import load_schema, validate_run_dict
from additive_unet.harness.selfcheck import cmd_selfcheck, run_gradchecks
from additive_unet.harness.table import cmd_table
from additive_unet.harness.train import Trainer, cmd_train, read_loss_log

__all__ = [
    # Configuration
    "RunConfig",
    "TrainConfig",
    "EvalConfig",
    "SynthSpec",
    "with_overrides",
    "load_schema",
    "validate_run_dict",
    "output_root",
    "PRESETS",
    "list_presets",
    "load_preset",
    # Manifests
    "RunManifest",
    "MANIFEST_FILE",
    # Commands
    "Trainer",
    "cmd_train",
    "read_loss_log",
    "cmd_eval",
    "cmd_denoise",
    "cmd_fetch_dataset",
    "cmd_sweep_alpha",
    "cmd_spectra",
    "cmd_table",
    "cmd_selfcheck",
    "run_gradchecks",
]
