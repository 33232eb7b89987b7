"""Deterministic float64 tensors with reverse-mode differentiation."""

from additive_unet.tensor.conv import conv2d
from additive_unet.tensor.gradcheck import GradCheckResult, gradcheck
from additive_unet.tensor.ops import (
    add,
    as_tensor,
    charbonnier,
    mean,
    relu,
    scalar_mul,
    softplus,
    sub,
)
from additive_unet.tensor.tensor import (
    Tape,
    TapeNode,
    Tensor,
    active_tape,
    backward,
    recording,
    zero_grad,
)

__all__ = [
    # Values
    "Tensor",
    "Tape",
    "TapeNode",
    "recording",
    "active_tape",
    "backward",
    "zero_grad",
    # Operations
    "add",
    "sub",
    "scalar_mul",
    "relu",
    "softplus",
    "mean",
    "charbonnier",
    "conv2d",
    "as_tensor",
    # Checking
    "gradcheck",
    "GradCheckResult",
]
