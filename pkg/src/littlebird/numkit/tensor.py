"""Dense tensor with a reverse-mode tape.

A Tensor wraps a numpy array. Operations on tensors that require gradients
record their parents and a backward closure; `Tensor.backward` walks the
recorded graph in reverse topological order and accumulates gradients into
leaf tensors (parameters and inputs created with ``requires_grad=True``).
"""

from __future__ import annotations

import weakref
from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Any

import numpy as np
import numpy.typing as npt

from littlebird.exceptions import DimensionError, LittleBirdError
from littlebird.numkit.memory import active_tracker

Array = npt.NDArray[np.floating[Any]]
BackwardFn = Callable[[Array], Sequence[Array | None]]

_DTYPE: ContextVar[type[np.floating[Any]]] = ContextVar("tensor_dtype", default=np.float64)


def default_dtype() -> type[np.floating[Any]]:
    """Float type used for newly created tensors."""
    return _DTYPE.get()


@contextmanager
def use_precision(bits: int) -> Iterator[None]:
    """Create tensors in 32- or 64-bit floats inside the block."""
    if bits not in (32, 64):
        raise LittleBirdError(f"Unsupported precision: {bits} bits", bits=bits)
    token = _DTYPE.set(np.float32 if bits == 32 else np.float64)
    try:
        yield
    finally:
        _DTYPE.reset(token)


class Tensor:
    """
    Dense row-major array plus optional gradient buffer.

    The gradient buffer, once allocated, always has the shape of `data`.
    """

    __slots__ = ("__weakref__", "_backward", "_parents", "data", "grad", "name", "requires_grad")

    # ndarray (op) Tensor defers to the Tensor's reflected operator
    __array_ufunc__ = None

    def __init__(
        self,
        data: npt.ArrayLike,
        *,
        requires_grad: bool = False,
        name: str | None = None,
        parents: tuple[Tensor, ...] = (),
        backward: BackwardFn | None = None,
    ) -> None:
        self.data: Array = np.asarray(data, dtype=default_dtype())
        self.grad: Array | None = None
        self.requires_grad = requires_grad
        self.name = name
        self._parents = parents
        self._backward = backward
        tracker = active_tracker()
        if tracker is not None:
            tracker.allocate(self.data.nbytes)
            weakref.finalize(self, tracker.release, self.data.nbytes)

    @classmethod
    def from_op(
        cls, data: Array, parents: tuple[Tensor, ...], backward: BackwardFn
    ) -> Tensor:
        """Result of an operation; records the tape only if a parent needs grads."""
        if any(p.requires_grad for p in parents):
            return cls(data, requires_grad=True, parents=parents, backward=backward)
        return cls(data)

    # --- shape helpers ---

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        return int(self.data.ndim)

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def T(self) -> Tensor:  # noqa: N802
        """Swap the last two axes."""
        from littlebird.numkit import ops

        return ops.swap_last(self)

    def numpy(self) -> Array:
        """Copy of the underlying data."""
        return self.data.copy()

    def item(self) -> float:
        if self.data.size != 1:
            raise DimensionError(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def detach(self) -> Tensor:
        """Same data, no tape."""
        return Tensor(self.data)

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{label}, requires_grad={self.requires_grad})"

    # --- gradients ---

    def zero_grad(self) -> None:
        self.grad = None

    def accumulate_grad(self, grad: Array) -> None:
        """Add `grad` into the buffer, allocating it on first use."""
        if grad.shape != self.data.shape:
            raise DimensionError(
                f"Gradient shape {grad.shape} does not match tensor shape {self.data.shape}"
            )
        if self.grad is None:
            self.grad = np.array(grad, dtype=self.data.dtype, copy=True)
            tracker = active_tracker()
            if tracker is not None:
                tracker.allocate(self.grad.nbytes)
                weakref.finalize(self, tracker.release, self.grad.nbytes)
        else:
            self.grad += grad

    def backward(self, grad: npt.ArrayLike | None = None) -> None:
        """Backpropagate from this tensor into every reachable leaf."""
        if grad is None:
            if self.data.size != 1:
                raise DimensionError(
                    f"backward() without a seed needs a scalar, got shape {self.shape}"
                )
            seed: Array = np.ones_like(self.data)
        else:
            seed = np.asarray(grad, dtype=self.data.dtype)
        if not self.requires_grad:
            return

        order = self._topological_order()
        pending: dict[int, Array] = {id(self): seed}
        for node in reversed(order):
            node_grad = pending.pop(id(node), None)
            if node_grad is None:
                continue
            if node._backward is None:
                node.accumulate_grad(node_grad)
                continue
            for parent, parent_grad in zip(
                node._parents, node._backward(node_grad), strict=True
            ):
                if parent_grad is None or not parent.requires_grad:
                    continue
                parent_grad = _unbroadcast(parent_grad, parent.data.shape)
                key = id(parent)
                if key in pending:
                    pending[key] = pending[key] + parent_grad
                else:
                    pending[key] = parent_grad

    def _topological_order(self) -> list[Tensor]:
        order: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
        return order

    # --- arithmetic ---

    def __add__(self, other: TensorLike) -> Tensor:
        other_t = as_tensor(other)
        return Tensor.from_op(
            self.data + other_t.data, (self, other_t), lambda g: (g, g)
        )

    __radd__ = __add__

    def __sub__(self, other: TensorLike) -> Tensor:
        other_t = as_tensor(other)
        return Tensor.from_op(
            self.data - other_t.data, (self, other_t), lambda g: (g, -g)
        )

    def __rsub__(self, other: TensorLike) -> Tensor:
        return as_tensor(other) - self

    def __neg__(self) -> Tensor:
        return Tensor.from_op(-self.data, (self,), lambda g: (-g,))

    def __mul__(self, other: TensorLike) -> Tensor:
        other_t = as_tensor(other)
        a, b = self.data, other_t.data
        return Tensor.from_op(a * b, (self, other_t), lambda g: (g * b, g * a))

    __rmul__ = __mul__

    def __truediv__(self, other: TensorLike) -> Tensor:
        other_t = as_tensor(other)
        a, b = self.data, other_t.data
        return Tensor.from_op(
            a / b, (self, other_t), lambda g: (g / b, -g * a / (b * b))
        )

    def __rtruediv__(self, other: TensorLike) -> Tensor:
        return as_tensor(other) / self

    def __matmul__(self, other: Tensor) -> Tensor:
        from littlebird.numkit import ops

        return ops.matmul(self, other)

    def reshape(self, *shape: int) -> Tensor:
        from littlebird.numkit import ops

        return ops.reshape(self, shape)


TensorLike = Tensor | float | int | npt.NDArray[Any]


def as_tensor(value: TensorLike) -> Tensor:
    """Wrap constants; tensors pass through unchanged."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def _unbroadcast(grad: Array, shape: tuple[int, ...]) -> Array:
    """Sum `grad` down to `shape`, undoing numpy broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, dim in enumerate(shape) if dim == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)
