"""Central finite-difference check of taped gradients."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from additive_unet.tensor.tensor import Tensor, backward, recording


@dataclass
class GradCheckResult:
    """Outcome of `gradcheck`."""

    max_rel_error: float
    probes: int
    tolerance: float
    worst: str = ""
    errors: list[float] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_rel_error < self.tolerance


def gradcheck(
    fn: Callable[..., Tensor],
    inputs: Sequence[Tensor],
    probes: int = 20,
    h: float = 1e-5,
    tolerance: float = 1e-4,
    seed: int = 0,
) -> GradCheckResult:
    """
    Compare analytic gradients of a scalar function with central differences.

    Args:
        fn: Maps the input tensors to a scalar tensor.
        inputs: Tensors to differentiate with respect to; their `requires_grad`
            is switched on and their gradients reset.
        probes: Number of randomly chosen coordinates to check.
        h: Finite-difference step.
        tolerance: Bound on |analytic - fd| / (|fd| + 1e-8).
        seed: Seed for choosing the probed coordinates.

    Returns:
        GradCheckResult with the worst relative error found.
    """
    for tensor in inputs:
        tensor.requires_grad = True
        tensor.zero_grad()
    with recording():
        loss = fn(*inputs)
        backward(loss)
    analytic = [
        t.grad.copy() if t.grad is not None else np.zeros_like(t.data) for t in inputs
    ]

    rng = np.random.default_rng(seed)
    errors: list[float] = []
    worst, worst_label = 0.0, ""
    for _ in range(probes):
        which = int(rng.integers(len(inputs)))
        tensor = inputs[which]
        flat = tensor.data.reshape(-1)
        idx = int(rng.integers(flat.size))
        original = flat[idx]
        flat[idx] = original + h
        plus = fn(*inputs).item()
        flat[idx] = original - h
        minus = fn(*inputs).item()
        flat[idx] = original
        numeric = (plus - minus) / (2.0 * h)
        exact = analytic[which].reshape(-1)[idx]
        rel = abs(exact - numeric) / (abs(numeric) + 1e-8)
        errors.append(rel)
        if rel >= worst:
            worst, worst_label = rel, f"input {which} element {idx}: {exact!r} vs {numeric!r}"

    return GradCheckResult(
        max_rel_error=worst,
        probes=probes,
        tolerance=tolerance,
        worst=worst_label,
        errors=errors,
    )
