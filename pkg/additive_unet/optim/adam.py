"""Adam with bias correction."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from additive_unet.errors import OptimizerError
from additive_unet.tensor import Tensor


@dataclass
class AdamState:
    """Moment buffers and hyperparameters for Adam."""

    lr: float = 2e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps_hat: float = 1e-8
    step_count: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def for_params(cls, params: Mapping[str, Tensor], **hyper) -> AdamState:
        state = cls(**hyper)
        for name, tensor in params.items():
            state.m[name] = np.zeros_like(tensor.data)
            state.v[name] = np.zeros_like(tensor.data)
        return state

    def hyperparameters(self) -> dict[str, float | int]:
        return {
            "lr": self.lr,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "eps_hat": self.eps_hat,
            "step_count": self.step_count,
        }


def adam_step(
    params: Mapping[str, Tensor],
    grads: Mapping[str, np.ndarray] | None,
    state: AdamState,
) -> None:
    """
    Apply one Adam update in place.

    Args:
        params: Named parameter tensors.
        grads: Gradient per parameter name; when None the tensors' own `grad`
            buffers are used.
        state: Optimizer state, updated in place.

    Raises:
        OptimizerError: If a parameter has no gradient or no moment buffer.
    """
    if grads is None:
        grads = {name: t.grad for name, t in params.items()}
    for name in params:
        if grads.get(name) is None:
            raise OptimizerError(f"adam_step: missing gradient for parameter {name!r}")
        if name not in state.m:
            raise OptimizerError(f"adam_step: no moment buffers for parameter {name!r}")

    state.step_count += 1
    t = state.step_count
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1**t
    correction2 = 1.0 - b2**t
    for name, tensor in params.items():
        g = grads[name]
        m = b1 * state.m[name] + (1.0 - b1) * g
        v = b2 * state.v[name] + (1.0 - b2) * (g * g)
        state.m[name] = m
        state.v[name] = v
        m_hat = m / correction1
        v_hat = v / correction2
        tensor.data -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps_hat)


class Adam:
    """
    Adam optimizer over a fixed set of named tensors.

    Example:
        >>> opt = Adam(params.named_tensors(), lr=2e-4)
        >>> opt.zero_grad()
        >>> ...  # forward + backward
        >>> opt.step()
    """

    def __init__(
        self,
        params: Mapping[str, Tensor],
        lr: float = 2e-4,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps_hat: float = 1e-8,
        state: AdamState | None = None,
    ):
        self.params = dict(params)
        self.state = state or AdamState.for_params(
            self.params, lr=lr, beta1=beta1, beta2=beta2, eps_hat=eps_hat
        )

    def step(self) -> None:
        adam_step(self.params, None, self.state)

    def zero_grad(self) -> None:
        for tensor in self.params.values():
            tensor.zero_grad()
