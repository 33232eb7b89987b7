"""Forward passes for the additive U-Net, its pseudo-additive baseline and DnCNN."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from additive_unet.errors import ConfigError, ShapeError
from additive_unet.model.config import Variant
from additive_unet.model.params import AdditiveUNetParams, DnCNNParams, ModelParams
from additive_unet.tensor import Tensor, relu, scalar_mul, sub

_TINY = float(np.finfo(np.float64).tiny)


@dataclass
class AdditiveForward:
    """Output of `forward_real_additive` plus the cached intermediates.

    `encoder_states` is x_0..x_L, `residuals` is r_1..r_L and
    `decoder_states` is u_0..u_L.
    """

    output: Tensor
    residuals: list[Tensor] = field(default_factory=list)
    encoder_states: list[Tensor] = field(default_factory=list)
    decoder_states: list[Tensor] = field(default_factory=list)

    @property
    def states(self) -> list[Tensor]:
        return self.decoder_states

    def __iter__(self):
        return iter((self.output, self.residuals, self.decoder_states))


def _check_input(x: Tensor, max_kernel: int) -> None:
    if x.ndim != 4:
        raise ShapeError(f"expected input [B,1,H,W], got {list(x.shape)}")
    if x.shape[1] != 1:
        raise ShapeError(f"expected a single input channel, got {x.shape[1]}")
    height, width = x.shape[2], x.shape[3]
    if min(height, width) < max_kernel:
        raise ShapeError(
            f"input {height}x{width} is smaller than the largest kernel ({max_kernel})"
        )


def forward_real_additive(
    params: AdditiveUNetParams,
    x: Tensor,
    subtractive: bool = True,
    gates: list[float] | None = None,
) -> AdditiveForward:
    """
    Run the additive U-Net.

    x_0 = stem(x); r_i = Enc_i(x_{i-1}), x_i = x_{i-1} - r_i;
    u_0 = x_L; u_{j+1} = Dec_j(u_j + alpha_j * r_{L-j}); y = head(u_L).

    Args:
        params: Network weights.
        x: Noisy input [B, 1, H, W].
        subtractive: When False the encoder keeps the raw block outputs
            (x_i = r_i) instead of subtracting them.
        gates: Fixed gate values replacing softplus(beta), one per decoder
            step. Overrides registered on `params` apply when this is None.

    Returns:
        AdditiveForward with output, residuals and states.
    """
    _check_input(x, params.config.max_kernel)
    depth = params.depth
    if gates is None:
        if not params.beta:
            raise ConfigError("pseudo-additive weights carry no gates; pass gates=")
        alphas = params.gates()
    else:
        if len(gates) != depth:
            raise ShapeError(f"expected {depth} gate values, got {len(gates)}")
        alphas = [float(g) for g in gates]

    state = params.stem(x)
    encoder_states = [state]
    residuals: list[Tensor] = []
    for block in params.enc_blocks:
        residual = block(state)
        residuals.append(residual)
        state = sub(state, residual) if subtractive else residual
        encoder_states.append(state)

    u = state
    decoder_states = [u]
    for j, block in enumerate(params.dec_blocks):
        u = block(u + scalar_mul(alphas[j], residuals[depth - 1 - j]))
        decoder_states.append(u)

    return AdditiveForward(
        output=params.head(u),
        residuals=residuals,
        encoder_states=encoder_states,
        decoder_states=decoder_states,
    )


def forward_pseudo_additive(params: AdditiveUNetParams, x: Tensor) -> Tensor:
    """U-Net with raw encoder activations added into the decoder at unit scale."""
    _check_input(x, params.config.max_kernel)
    activations: list[Tensor] = []
    a = params.stem(x)
    for block in params.enc_blocks:
        a = block(a)
        activations.append(a)

    u = a
    for j, block in enumerate(params.dec_blocks):
        u = block(u + activations[params.depth - 1 - j])
    return params.head(u)


def forward_dncnn(params: DnCNNParams, x: Tensor) -> Tensor:
    """Residual denoiser: y = x - noise_estimate(x)."""
    _check_input(x, 3)
    h = x
    last = len(params.layers) - 1
    for i, layer in enumerate(params.layers):
        h = layer(h)
        if i != last:
            h = relu(h)
    return sub(x, h)


def forward(params: ModelParams, x: Tensor) -> Tensor:
    """Dispatch on the configured variant and return the denoised tensor."""
    variant = params.config.variant
    if variant is Variant.REAL_ADDITIVE:
        return forward_real_additive(params, x).output
    if variant is Variant.PSEUDO_ADDITIVE:
        return forward_pseudo_additive(params, x)
    return forward_dncnn(params, x)


def gate_values(params: ModelParams) -> list[float]:
    """
    Learned alpha_j = softplus(beta_j) for each decoder step.

    softplus underflows to 0.0 below beta ~ -745; such gates report the
    smallest positive float so every alpha stays > 0.
    """
    if not isinstance(params, AdditiveUNetParams) or not params.config.is_gated:
        raise ConfigError(f"{params.config.label} has no learnable gates")
    return [max(float(np.logaddexp(0.0, b.item())), _TINY) for b in params.beta]
