"""Learnable weights for each model family."""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from additive_unet.model.config import ModelConfig, Variant
from additive_unet.tensor import Tensor, conv2d, relu, softplus


@dataclass
class ConvWeights:
    """Weight [Cout, Cin, k, k] and bias [Cout] of one same-size convolution."""

    weight: Tensor
    bias: Tensor

    @classmethod
    def init(cls, rng: np.random.Generator, cin: int, cout: int, k: int) -> ConvWeights:
        bound = 1.0 / math.sqrt(cin * k * k)
        weight = rng.uniform(-bound, bound, size=(cout, cin, k, k))
        bias = rng.uniform(-bound, bound, size=(cout,))
        return cls(Tensor(weight, requires_grad=True), Tensor(bias, requires_grad=True))

    @property
    def kernel_size(self) -> int:
        return self.weight.shape[2]

    def __call__(self, x: Tensor) -> Tensor:
        return conv2d(x, self.weight, self.bias, padding=self.kernel_size // 2)

    def named_tensors(self, prefix: str) -> dict[str, Tensor]:
        return {f"{prefix}.weight": self.weight, f"{prefix}.bias": self.bias}


@dataclass
class BlockWeights:
    """Conv(k, C->C) -> ReLU -> Conv(k, C->C); no internal skip."""

    first: ConvWeights
    second: ConvWeights

    @classmethod
    def init(cls, rng: np.random.Generator, channels: int, k: int) -> BlockWeights:
        return cls(
            ConvWeights.init(rng, channels, channels, k),
            ConvWeights.init(rng, channels, channels, k),
        )

    @property
    def kernel_size(self) -> int:
        return self.first.kernel_size

    def __call__(self, x: Tensor) -> Tensor:
        return self.second(relu(self.first(x)))

    def named_tensors(self, prefix: str) -> dict[str, Tensor]:
        return {
            **self.first.named_tensors(f"{prefix}.first"),
            **self.second.named_tensors(f"{prefix}.second"),
        }


@dataclass
class AdditiveUNetParams:
    """
    Weights of the additive U-Net family.

    `enc_blocks[i]` is Enc_{i+1} (kernel k_{i+1}); `dec_blocks[j]` is Dec_j and
    uses k_{L-j}, the kernel of the encoder block whose residual it consumes.
    `beta` holds the gate pre-activations for the real variant and is empty
    for the pseudo-additive one.
    """

    config: ModelConfig
    stem: ConvWeights
    enc_blocks: list[BlockWeights]
    dec_blocks: list[BlockWeights]
    beta: list[Tensor]
    head: ConvWeights
    gate_overrides: dict[int, float] = field(default_factory=dict, repr=False)

    @property
    def depth(self) -> int:
        return len(self.enc_blocks)

    def named_tensors(self) -> dict[str, Tensor]:
        tensors = dict(self.stem.named_tensors("stem"))
        for i, block in enumerate(self.enc_blocks):
            tensors.update(block.named_tensors(f"enc.{i}"))
        for j, block in enumerate(self.dec_blocks):
            tensors.update(block.named_tensors(f"dec.{j}"))
        for j, beta in enumerate(self.beta):
            tensors[f"beta.{j}"] = beta
        tensors.update(self.head.named_tensors("head"))
        return tensors

    def gates(self) -> list[Tensor | float]:
        """Gate for each decoder step: softplus(beta_j), or the override value."""
        out: list[Tensor | float] = []
        for j, beta in enumerate(self.beta):
            if j in self.gate_overrides:
                out.append(float(self.gate_overrides[j]))
            else:
                out.append(softplus(beta))
        return out

    @contextmanager
    def gates_overridden(self, values: dict[int, float]) -> Iterator[AdditiveUNetParams]:
        """Temporarily pin gates to fixed values, bypassing softplus."""
        for j in values:
            if not 0 <= j < len(self.beta):
                raise IndexError(f"gate index {j} out of range 0..{len(self.beta) - 1}")
        saved = dict(self.gate_overrides)
        self.gate_overrides.update({j: float(v) for j, v in values.items()})
        try:
            yield self
        finally:
            self.gate_overrides.clear()
            self.gate_overrides.update(saved)


@dataclass
class DnCNNParams:
    """Plain conv stack: 1->C, (depth - 2) x C->C, C->1, ReLU between layers."""

    config: ModelConfig
    layers: list[ConvWeights]

    @property
    def depth(self) -> int:
        return len(self.layers)

    def named_tensors(self) -> dict[str, Tensor]:
        tensors: dict[str, Tensor] = {}
        for i, layer in enumerate(self.layers):
            tensors.update(layer.named_tensors(f"layer.{i}"))
        return tensors


ModelParams = AdditiveUNetParams | DnCNNParams


def build_params(config: ModelConfig) -> ModelParams:
    """
    Initialize weights for `config` with uniform fan-in scaling.

    Every weight and bias is drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in))
    using a generator seeded with `config.seed`; gate pre-activations start at
    0 (alpha = ln 2).
    """
    rng = np.random.default_rng(config.seed)
    channels = config.channels

    if config.variant is Variant.DNCNN:
        layers = [ConvWeights.init(rng, 1, channels, 3)]
        for _ in range(config.depth - 2):
            layers.append(ConvWeights.init(rng, channels, channels, 3))
        layers.append(ConvWeights.init(rng, channels, 1, 3))
        return DnCNNParams(config=config, layers=layers)

    schedule = config.kernel_schedule
    stem = ConvWeights.init(rng, 1, channels, 3)
    enc = [BlockWeights.init(rng, channels, k) for k in schedule]
    dec = [BlockWeights.init(rng, channels, k) for k in reversed(schedule)]
    head = ConvWeights.init(rng, channels, 1, 1)
    beta = []
    if config.variant is Variant.REAL_ADDITIVE:
        beta = [Tensor(0.0, requires_grad=True) for _ in schedule]
    return AdditiveUNetParams(
        config=config, stem=stem, enc_blocks=enc, dec_blocks=dec, beta=beta, head=head
    )


def parameter_count(params: ModelParams) -> int:
    return sum(t.size for t in params.named_tensors().values())


def expected_parameter_count(config: ModelConfig) -> int:
    """Closed-form number of learnable scalars for `config`."""
    c = config.channels
    if config.variant is Variant.DNCNN:
        first = 9 * c + c
        middle = (config.depth - 2) * (9 * c * c + c)
        last = 9 * c + 1
        return first + middle + last
    stem = 9 * c + c
    head = c + 1
    blocks = sum(2 * (c * c * k * k + c) for k in config.kernel_schedule)
    gates = config.depth if config.variant is Variant.REAL_ADDITIVE else 0
    return stem + 2 * blocks + gates + head
