"""Gate sweeps: score the model while one skip gate is pinned to fixed values."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from additive_unet.errors import ConfigError
from additive_unet.metrics import EvalImage, evaluate_model, format_psnr, format_ssim, mean_scores
from additive_unet.model import AdditiveUNetParams, gate_values


@dataclass
class SweepResult:
    gate_index: int
    sweep_values: list[float]
    learned_alpha: float
    psnr_curve: list[float] = field(default_factory=list)
    ssim_curve: list[float] = field(default_factory=list)

    def best(self) -> tuple[float, float]:
        """(alpha, psnr) at the PSNR peak."""
        i = int(np.argmax(self.psnr_curve))
        return self.sweep_values[i], self.psnr_curve[i]


def sweep_values(learned: float, low: float | None, high: float | None, steps: int) -> list[float]:
    """Evenly spaced alphas; the default range is [0, 2 * learned]."""
    low = 0.0 if low is None else low
    high = 2.0 * learned if high is None else high
    if steps < 1:
        raise ConfigError(f"sweep needs at least one step, got {steps}")
    if steps == 1:
        return [low]
    return [float(v) for v in np.linspace(low, high, steps)]


def sweep_gate(
    params: AdditiveUNetParams,
    gate_index: int,
    values: list[float],
    eval_set: list[EvalImage],
    sigma: float,
) -> SweepResult:
    """
    Evaluate the model with alpha_{gate_index} pinned to each value in turn.

    The override bypasses softplus and is removed afterwards; the weights
    themselves are never written.

    Raises:
        IndexError: If gate_index is out of range.
        ValueError: If a value is negative or not finite.
    """
    learned = gate_values(params)
    if not 0 <= gate_index < len(learned):
        raise IndexError(f"gate index {gate_index} out of range 0..{len(learned) - 1}")
    bad = [v for v in values if not math.isfinite(v) or v < 0]
    if bad:
        raise ValueError(f"gate values must be finite and >= 0, got {bad}")

    result = SweepResult(
        gate_index=gate_index, sweep_values=list(values), learned_alpha=learned[gate_index]
    )
    for value in values:
        with params.gates_overridden({gate_index: value}):
            rows = evaluate_model(params, eval_set, sigma)
        mean_psnr, mean_ssim = mean_scores(rows)
        result.psnr_curve.append(mean_psnr)
        result.ssim_curve.append(mean_ssim)
    return result


def sweep_all_gates(
    params: AdditiveUNetParams,
    steps: int,
    eval_set: list[EvalImage],
    sigma: float,
) -> list[SweepResult]:
    """Sweep every gate over [0, 2 * its learned value]."""
    return [
        sweep_gate(params, j, sweep_values(alpha, None, None, steps), eval_set, sigma)
        for j, alpha in enumerate(gate_values(params))
    ]


def write_sweep_csv(result: SweepResult, path: str) -> str:
    """Columns: alpha, psnr_db, ssim."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["alpha", "psnr_db", "ssim"])
        for alpha, p, s in zip(result.sweep_values, result.psnr_curve, result.ssim_curve):
            writer.writerow([repr(alpha), format_psnr(p), format_ssim(s)])
    return path
