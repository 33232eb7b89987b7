"""Finite-difference check of every differentiable operation."""

from __future__ import annotations

import time
from typing import Callable

import numpy as np

from additive_unet.config import get_messages
from additive_unet.errors import NumericError
from additive_unet.model import ModelConfig, Variant, build_params, forward
from additive_unet.tensor import (
    GradCheckResult,
    Tensor,
    add,
    charbonnier,
    conv2d,
    gradcheck,
    mean,
    relu,
    scalar_mul,
    softplus,
    sub,
)

CheckCase = Callable[[np.random.Generator], tuple[Callable[..., Tensor], list[Tensor]]]


def _away_from_zero(rng: np.random.Generator, shape: tuple[int, ...]) -> Tensor:
    """Values with |x| in [0.1, 1], so h-sized steps never cross a ReLU kink."""
    magnitude = rng.uniform(0.1, 1.0, size=shape)
    sign = np.where(rng.random(shape) < 0.5, -1.0, 1.0)
    return Tensor(sign * magnitude)


def _normal(rng: np.random.Generator, *shape: int) -> Tensor:
    return Tensor(rng.standard_normal(shape))


def _conv_case(k: int) -> CheckCase:
    def case(rng):
        x = _normal(rng, 2, 3, 7, 6)
        w = Tensor(rng.standard_normal((4, 3, k, k)) * 0.3)
        b = _normal(rng, 4)
        return (lambda x, w, b: mean(softplus(conv2d(x, w, b, k // 2)))), [x, w, b]

    return case


def _model_case(variant: Variant) -> CheckCase:
    def case(rng):
        config = ModelConfig(variant=variant, depth=3, channels=4, kernel_schedule=[3, 5, 3], seed=7)
        params = build_params(config)
        if variant is Variant.REAL_ADDITIVE:
            for beta in params.beta:
                beta.data[...] = rng.uniform(-1.0, 1.0)
        x = Tensor(rng.uniform(0.0, 1.0, size=(1, 1, 8, 8)))
        target = Tensor(rng.uniform(0.0, 1.0, size=(1, 1, 8, 8)))
        tensors = list(params.named_tensors().values())

        def fn(*_):
            return charbonnier(forward(params, x), target)

        return fn, tensors

    return case


OP_CASES: dict[str, CheckCase] = {
    "add": lambda rng: ((lambda a, b: mean(softplus(add(a, b)))), [_normal(rng, 3, 4), _normal(rng, 3, 4)]),
    "sub": lambda rng: ((lambda a, b: mean(softplus(sub(a, b)))), [_normal(rng, 3, 4), _normal(rng, 3, 4)]),
    "scalar_mul": lambda rng: (
        (lambda s, x: mean(softplus(scalar_mul(s, x)))),
        [_normal(rng, 1), _normal(rng, 2, 1, 3, 3)],
    ),
    "relu": lambda rng: ((lambda x: mean(softplus(relu(x)))), [_away_from_zero(rng, (4, 5))]),
    "softplus": lambda rng: ((lambda x: mean(softplus(x))), [Tensor(rng.standard_normal((4, 5)) * 3.0)]),
    "mean": lambda rng: ((lambda x: softplus(mean(x))), [_normal(rng, 2, 3)]),
    "charbonnier": lambda rng: (
        (lambda p, t: charbonnier(p, t, 1e-3)),
        [_normal(rng, 2, 1, 4, 4), _normal(rng, 2, 1, 4, 4)],
    ),
    "conv2d[k=1]": _conv_case(1),
    "conv2d[k=3]": _conv_case(3),
    "conv2d[k=5]": _conv_case(5),
}

MODEL_CASES: dict[str, CheckCase] = {
    "model[real_additive]": _model_case(Variant.REAL_ADDITIVE),
    "model[pseudo_additive]": _model_case(Variant.PSEUDO_ADDITIVE),
}


def run_gradchecks(
    cases: dict[str, CheckCase] | None = None,
    probes: int = 20,
    tolerance: float = 1e-4,
    seed: int = 0,
) -> list[tuple[str, GradCheckResult]]:
    """Gradcheck each case with its own generator seeded from (seed, case index)."""
    cases = OP_CASES if cases is None else cases
    results = []
    for index, (name, case) in enumerate(cases.items()):
        fn, inputs = case(np.random.default_rng([seed, index]))
        results.append((name, gradcheck(fn, inputs, probes=probes, tolerance=tolerance, seed=seed)))
    return results


def cmd_selfcheck(
    include_models: bool = True,
    probes: int = 20,
    seed: int = 0,
    verbose: bool = True,
    lang: str = "en",
) -> list[tuple[str, GradCheckResult]]:
    """
    Run the gradient suite and report each case.

    Raises:
        NumericError: If any case exceeds the tolerance.
    """
    msgs = get_messages(lang)
    cases = dict(OP_CASES)
    if include_models:
        cases.update(MODEL_CASES)

    started = time.perf_counter()
    results = run_gradchecks(cases, probes=probes, seed=seed)
    if verbose:
        print("=" * 50)
        print(f"{msgs['selfcheck']}: {len(results)} x {probes} probes")
        print("=" * 50)
        for name, result in results:
            status = msgs["passed"] if result.passed else msgs["failed"]
            print(f"  {name:<24} max rel err {result.max_rel_error:.2e}  {status}")
        print(f"{msgs['elapsed']}: {time.perf_counter() - started:.1f}s")

    failed = [name for name, result in results if not result.passed]
    if failed:
        worst = {name: r.worst for name, r in results if not r.passed}
        raise NumericError(f"gradient check failed for {', '.join(failed)}: {worst}")
    return results
