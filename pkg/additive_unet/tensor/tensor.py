"""Tensor value and the tape that records operations for reverse-mode differentiation."""

from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from additive_unet.errors import ShapeError

BackwardFn = Callable[[np.ndarray], tuple[np.ndarray | None, ...]]


@dataclass(eq=False)
class TapeNode:
    """One recorded operation: its output, its inputs and the rule mapping
    the output gradient to input gradients."""

    index: int
    op: str
    output: Tensor
    inputs: tuple[Tensor, ...]
    backward: BackwardFn
    tape: Tape


class Tape:
    """
    Ordered record of differentiable operations.

    Nodes are appended as operations execute, so every node's inputs were
    produced by an earlier node (or are leaves). A tape is bound to the thread
    that created it and must not be shared.
    """

    def __init__(self):
        self.nodes: list[TapeNode] = []

    def record(
        self, op: str, output: Tensor, inputs: tuple[Tensor, ...], backward: BackwardFn
    ) -> TapeNode:
        node = TapeNode(len(self.nodes), op, output, inputs, backward, self)
        self.nodes.append(node)
        output.tape_node = node
        return node

    def backward(self, loss: Tensor) -> None:
        """Propagate d(loss)/d(.) from `loss` back to every reachable leaf."""
        if loss.data.ndim != 0:
            raise ShapeError(
                f"backward() needs a scalar loss, got shape {list(loss.shape)}"
            )
        node = loss.tape_node
        if node is None or node.tape is not self:
            raise ValueError("loss was not produced under this tape")

        pending: dict[int, np.ndarray] = {node.index: np.ones((), dtype=np.float64)}
        for current in reversed(self.nodes[: node.index + 1]):
            grad_out = pending.pop(current.index, None)
            if grad_out is None:
                continue
            for tensor, grad in zip(current.inputs, current.backward(grad_out)):
                if grad is None or not tensor.requires_grad:
                    continue
                producer = tensor.tape_node
                if producer is not None and producer.tape is self:
                    if producer.index in pending:
                        pending[producer.index] = pending[producer.index] + grad
                    else:
                        pending[producer.index] = grad
                else:
                    tensor.accumulate_grad(grad)

    def clear(self) -> None:
        for node in self.nodes:
            node.output.tape_node = None
        self.nodes = []


# per thread (and per asyncio task); a new thread starts with no tape
_active_tape: ContextVar[Tape | None] = ContextVar("additive_unet_active_tape", default=None)


def active_tape() -> Tape | None:
    """Return the tape operations are currently recorded on, if any."""
    return _active_tape.get()


@contextmanager
def recording() -> Iterator[Tape]:
    """
    Record differentiable operations for the duration of the block.

    Outside a `recording()` block operations run in inference mode: nothing is
    taped and results never require gradients.

    Example:
        >>> with recording() as tape:
        ...     loss = mean(relu(x))
        ...     backward(loss)
    """
    tape = Tape()
    token = _active_tape.set(tape)
    try:
        yield tape
    finally:
        _active_tape.reset(token)
        tape.clear()


class Tensor:
    """
    N-dimensional array of 64-bit reals with optional gradient.

    Args:
        data: Anything `numpy.asarray` accepts; copied into a contiguous
            float64 buffer.
        requires_grad: Whether gradients should be accumulated into `grad`.
    """

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.array(data, dtype=np.float64, order="C", copy=True)
        self.requires_grad = bool(requires_grad)
        self.grad: np.ndarray | None = None
        self.tape_node: TapeNode | None = None

    @classmethod
    def wrap(cls, data: np.ndarray, requires_grad: bool = False) -> Tensor:
        """Adopt an already-float64 array without copying."""
        out = cls.__new__(cls)
        # 0-d results must stay 0-d
        out.data = np.asarray(data, dtype=np.float64, order="C")
        out.requires_grad = requires_grad
        out.grad = None
        out.tape_node = None
        return out

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() needs a single element, got shape {list(self.shape)}")
        return float(self.data.reshape(()))

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> Tensor:
        return Tensor(self.data)

    def accumulate_grad(self, grad: np.ndarray) -> None:
        if grad.shape != self.data.shape:
            grad = np.reshape(grad, self.data.shape)
        if self.grad is None:
            self.grad = np.array(grad, dtype=np.float64, copy=True)
        else:
            self.grad = self.grad + grad

    def zero_grad(self) -> None:
        self.grad = None

    def __add__(self, other: Tensor) -> Tensor:
        from additive_unet.tensor.ops import add

        return add(self, other)

    def __sub__(self, other: Tensor) -> Tensor:
        from additive_unet.tensor.ops import sub

        return sub(self, other)

    def __mul__(self, scalar) -> Tensor:
        from additive_unet.tensor.ops import scalar_mul

        return scalar_mul(scalar, self)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={list(self.shape)}{flag})"


def backward(loss: Tensor) -> None:
    """Populate `grad` on every requires_grad leaf that `loss` depends on."""
    if loss.data.ndim != 0:
        raise ShapeError(f"backward() needs a scalar loss, got shape {list(loss.shape)}")
    if loss.tape_node is None:
        raise ValueError("loss was not produced under an active tape")
    loss.tape_node.tape.backward(loss)


def zero_grad(tensors) -> None:
    for tensor in tensors:
        tensor.zero_grad()
