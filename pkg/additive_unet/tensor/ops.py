"""Elementwise, reduction and loss operations on `Tensor`."""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from additive_unet.errors import ShapeError
from additive_unet.tensor.tensor import BackwardFn, Tensor, active_tape


def _result(op: str, data: np.ndarray, inputs: tuple[Tensor, ...], backward: BackwardFn) -> Tensor:
    tape = active_tape()
    needs_grad = tape is not None and any(t.requires_grad for t in inputs)
    out = Tensor.wrap(data, requires_grad=needs_grad)
    if needs_grad:
        tape.record(op, out, inputs, backward)
    return out


def _check_same_shape(op: str, a: Tensor, b: Tensor) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{op}: shape mismatch {list(a.shape)} vs {list(b.shape)}")


def as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def add(a: Tensor, b: Tensor) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_same_shape("add", a, b)
    return _result("add", a.data + b.data, (a, b), lambda g: (g, g))


def sub(a: Tensor, b: Tensor) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_same_shape("sub", a, b)
    return _result("sub", a.data - b.data, (a, b), lambda g: (g, -g))


def scalar_mul(scalar, x: Tensor) -> Tensor:
    """Multiply `x` by a scalar; the scalar may itself be a one-element Tensor."""
    s = as_tensor(scalar)
    x = as_tensor(x)
    if s.size != 1:
        raise ShapeError(f"scalar_mul: scalar operand has shape {list(s.shape)}")
    value = float(s.data.reshape(()))

    def backward(g: np.ndarray):
        grad_s = np.full(s.shape, float(np.sum(g * x.data)))
        return grad_s, g * value

    return _result("scalar_mul", x.data * value, (s, x), backward)


def relu(x: Tensor) -> Tensor:
    x = as_tensor(x)
    mask = x.data > 0
    return _result("relu", np.where(mask, x.data, 0.0), (x,), lambda g: (g * mask,))


def softplus(x: Tensor) -> Tensor:
    """ln(1 + e^x), evaluated as logaddexp(0, x) so large |x| neither
    overflows nor loses the small positive tail."""
    x = as_tensor(x)
    return _result(
        "softplus", np.logaddexp(0.0, x.data), (x,), lambda g: (g * expit(x.data),)
    )


def mean(x: Tensor) -> Tensor:
    x = as_tensor(x)
    n = x.size
    return _result(
        "mean",
        np.asarray(x.data.mean()),
        (x,),
        lambda g: (np.full(x.shape, float(g) / n),),
    )


def charbonnier(pred: Tensor, target: Tensor, epsilon: float = 1e-3) -> Tensor:
    """
    Mean Charbonnier penalty sqrt((pred - target)^2 + epsilon^2).

    Args:
        pred: Network output.
        target: Clean reference of the same shape.
        epsilon: Smoothing constant, must be positive.

    Returns:
        Scalar tensor.
    """
    if not epsilon > 0:
        raise ValueError(f"charbonnier: epsilon must be > 0, got {epsilon}")
    pred, target = as_tensor(pred), as_tensor(target)
    _check_same_shape("charbonnier", pred, target)
    diff = pred.data - target.data
    root = np.sqrt(diff * diff + epsilon * epsilon)
    n = diff.size

    def backward(g: np.ndarray):
        grad = (float(g) / n) * (diff / root)
        return grad, -grad

    return _result("charbonnier", np.asarray(root.mean()), (pred, target), backward)
