"""Model zoo: additive U-Net, pseudo-additive U-Net and DnCNN."""

from additive_unet.model.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from additive_unet.model.config import KERNEL_SCHEDULES, ModelConfig, Variant
from additive_unet.model.params import (
    AdditiveUNetParams,
    BlockWeights,
    ConvWeights,
    DnCNNParams,
    ModelParams,
    build_params,
    expected_parameter_count,
    parameter_count,
)
from additive_unet.model.zoo import (
    AdditiveForward,
    forward,
    forward_dncnn,
    forward_pseudo_additive,
    forward_real_additive,
    gate_values,
)

__all__ = [
    # Configuration
    "ModelConfig",
    "Variant",
    "KERNEL_SCHEDULES",
    # Weights
    "AdditiveUNetParams",
    "DnCNNParams",
    "BlockWeights",
    "ConvWeights",
    "ModelParams",
    "build_params",
    "parameter_count",
    "expected_parameter_count",
    # Forward passes
    "AdditiveForward",
    "forward",
    "forward_real_additive",
    "forward_pseudo_additive",
    "forward_dncnn",
    "gate_values",
    # Persistence
    "Checkpoint",
    "save_checkpoint",
    "load_checkpoint",
]
