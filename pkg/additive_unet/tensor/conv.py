"""Same-size 2-D convolution (cross-correlation) with zero padding."""

from __future__ import annotations

import numpy as np

from additive_unet.errors import ShapeError
from additive_unet.tensor.ops import _result, as_tensor
from additive_unet.tensor.tensor import Tensor


def _correlate(x: np.ndarray, w: np.ndarray, padding: int) -> np.ndarray:
    """Cross-correlate x[B,Cin,H,W] with w[Cout,Cin,k,k]; returns [B,Cout,H,W].

    Accumulates one kernel tap at a time in a fixed order, so the result is
    bitwise reproducible for a given shape.
    """
    batch, _, height, width = x.shape
    k = w.shape[2]
    padded = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    out = np.zeros((w.shape[0], batch, height, width), dtype=np.float64)
    for i in range(k):
        for j in range(k):
            window = padded[:, :, i : i + height, j : j + width]
            out += np.tensordot(w[:, :, i, j], window, axes=([1], [1]))
    return np.ascontiguousarray(out.transpose(1, 0, 2, 3))


def _weight_grad(x: np.ndarray, g: np.ndarray, k: int, padding: int) -> np.ndarray:
    _, _, height, width = x.shape
    padded = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    grad = np.empty((g.shape[1], x.shape[1], k, k), dtype=np.float64)
    for i in range(k):
        for j in range(k):
            window = padded[:, :, i : i + height, j : j + width]
            grad[:, :, i, j] = np.tensordot(g, window, axes=([0, 2, 3], [0, 2, 3]))
    return grad


def conv2d(input: Tensor, weight: Tensor, bias: Tensor, padding: int) -> Tensor:
    """
    Zero-padded cross-correlation that keeps the spatial size.

    Args:
        input: Tensor[B, Cin, H, W].
        weight: Tensor[Cout, Cin, k, k] with k odd.
        bias: Tensor[Cout].
        padding: Must equal k // 2.

    Returns:
        Tensor[B, Cout, H, W].

    Raises:
        ShapeError: On any shape or padding violation.
    """
    x, w, b = as_tensor(input), as_tensor(weight), as_tensor(bias)
    if x.ndim != 4:
        raise ShapeError(f"conv2d: input must be [B,C,H,W], got {list(x.shape)}")
    if w.ndim != 4 or w.shape[2] != w.shape[3]:
        raise ShapeError(f"conv2d: weight must be [Cout,Cin,k,k], got {list(w.shape)}")
    cout, cin, k, _ = w.shape
    if x.shape[1] != cin:
        raise ShapeError(
            f"conv2d: input has {x.shape[1]} channels but weight expects {cin}"
        )
    if b.shape != (cout,):
        raise ShapeError(f"conv2d: bias must be [{cout}], got {list(b.shape)}")
    if k % 2 == 0:
        raise ShapeError(f"conv2d: kernel size must be odd, got {k}")
    if padding != k // 2:
        raise ShapeError(
            f"conv2d: padding must be {k // 2} for a {k}x{k} kernel, got {padding}"
        )

    out = _correlate(x.data, w.data, padding) + b.data[None, :, None, None]

    def backward(g: np.ndarray):
        flipped = np.ascontiguousarray(w.data.transpose(1, 0, 2, 3)[:, :, ::-1, ::-1])
        grad_x = _correlate(g, flipped, padding) if x.requires_grad else None
        grad_w = _weight_grad(x.data, g, k, padding) if w.requires_grad else None
        grad_b = g.sum(axis=(0, 2, 3)) if b.requires_grad else None
        return grad_x, grad_w, grad_b

    return _result("conv2d", out, (x, w, b), backward)
