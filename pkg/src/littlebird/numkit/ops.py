"""Differentiable operations on Tensors.

Every operation supports leading batch axes; attention heads and blocks ride
along as batch dimensions. Backward passes are written out analytically and
checked against central differences in the test suite.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
import numpy.typing as npt

from littlebird.exceptions import DimensionError, InputError, NumericError
from littlebird.numkit.tensor import Array, Tensor, TensorLike, as_tensor

MASK_FILL = -1e30
LAYER_NORM_EPS = 1e-5
_GELU_C = math.sqrt(2.0 / math.pi)

BoolMask = npt.NDArray[np.bool_]


# --- linear algebra and shape ---


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Batched matrix product over the last two axes."""
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise DimensionError(
            f"Cannot multiply shapes {a.shape} and {b.shape}",
            left=a.shape,
            right=b.shape,
        )
    a_data, b_data = a.data, b.data

    def backward(g: Array) -> tuple[Array, Array]:
        return g @ np.swapaxes(b_data, -1, -2), np.swapaxes(a_data, -1, -2) @ g

    return Tensor.from_op(a_data @ b_data, (a, b), backward)


def transpose(x: Tensor, axes: Sequence[int]) -> Tensor:
    inverse = np.argsort(axes)
    return Tensor.from_op(
        np.transpose(x.data, axes), (x,), lambda g: (np.transpose(g, inverse),)
    )


def swap_last(x: Tensor) -> Tensor:
    return Tensor.from_op(
        np.swapaxes(x.data, -1, -2), (x,), lambda g: (np.swapaxes(g, -1, -2),)
    )


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    original = x.shape
    try:
        data = x.data.reshape(tuple(shape))
    except ValueError as exc:
        raise DimensionError(
            f"Cannot reshape {original} to {tuple(shape)}", shape=original
        ) from exc
    return Tensor.from_op(data, (x,), lambda g: (g.reshape(original),))


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    """Concatenate along `axis`; other axes must agree."""
    if not tensors:
        raise DimensionError("concat needs at least one tensor")
    try:
        data = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError as exc:
        raise DimensionError(
            f"Cannot concatenate shapes {[t.shape for t in tensors]} on axis {axis}"
        ) from exc
    splits = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g: Array) -> list[Array]:
        return np.split(g, splits, axis=axis)

    return Tensor.from_op(data, tuple(tensors), backward)


def take(x: Tensor, indices: npt.ArrayLike, axis: int = 0) -> Tensor:
    """Gather along `axis`; the result has shape x[:axis] + indices.shape + x[axis+1:]."""
    idx = np.asarray(indices, dtype=np.intp)
    axis = axis % x.ndim
    if idx.size and (idx.min() < -x.shape[axis] or idx.max() >= x.shape[axis]):
        raise DimensionError(
            f"Index out of range for axis {axis} of shape {x.shape}", shape=x.shape
        )
    shape = x.shape

    def backward(g: Array) -> tuple[Array]:
        gathered = list(range(axis, axis + idx.ndim))
        g_front = np.moveaxis(g, gathered, list(range(idx.ndim)))
        acc = np.zeros((shape[axis], *shape[:axis], *shape[axis + 1 :]), dtype=g.dtype)
        np.add.at(acc, idx, g_front)
        return (np.moveaxis(acc, 0, axis),)

    return Tensor.from_op(np.take(x.data, idx, axis=axis), (x,), backward)


def narrow(x: Tensor, axis: int, start: int, stop: int) -> Tensor:
    """Contiguous slice [start, stop) along `axis`."""
    axis = axis % x.ndim
    index = [slice(None)] * x.ndim
    index[axis] = slice(start, stop)
    key = tuple(index)
    shape = x.shape

    def backward(g: Array) -> tuple[Array]:
        out = np.zeros(shape, dtype=g.dtype)
        out[key] = g
        return (out,)

    return Tensor.from_op(x.data[key], (x,), backward)


# --- reductions and elementwise ---


def sum(x: Tensor, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    shape = x.shape

    def backward(g: Array) -> tuple[Array]:
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, shape),)

    return Tensor.from_op(np.sum(x.data, axis=axis, keepdims=keepdims), (x,), backward)


def mean(x: Tensor, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> Tensor:
    if axis is None:
        count = x.size
    else:
        axes = (axis,) if isinstance(axis, int) else axis
        count = int(np.prod([x.shape[a] for a in axes]))
    return sum(x, axis=axis, keepdims=keepdims) * (1.0 / max(count, 1))


def log(x: Tensor) -> Tensor:
    data = x.data
    return Tensor.from_op(np.log(data), (x,), lambda g: (g / data,))


def scale(x: Tensor, factor: float) -> Tensor:
    return Tensor.from_op(x.data * factor, (x,), lambda g: (g * factor,))


def gelu(x: Tensor) -> Tensor:
    """GELU, tanh form: 0.5·x·(1 + tanh(c·(x + 0.044715·x³)))."""
    data = x.data
    inner = _GELU_C * (data + 0.044715 * data**3)
    t = np.tanh(inner)

    def backward(g: Array) -> tuple[Array]:
        d_inner = _GELU_C * (1.0 + 3 * 0.044715 * data**2)
        return (g * (0.5 * (1.0 + t) + 0.5 * data * (1.0 - t * t) * d_inner),)

    return Tensor.from_op(0.5 * data * (1.0 + t), (x,), backward)


# --- normalization ---


def _softmax_data(scores: Array, mask: BoolMask | None) -> Array:
    if np.isnan(scores).any():
        raise NumericError("NaN in softmax input", shape=scores.shape)
    if mask is None:
        valid = np.ones(scores.shape, dtype=bool)
    else:
        valid = np.broadcast_to(mask, scores.shape)
    filled = np.where(valid, scores, MASK_FILL)
    if np.isposinf(filled).any():
        raise NumericError("+inf in softmax input", shape=scores.shape)
    row_max = filled.max(axis=-1, keepdims=True)
    row_max = np.where(np.isfinite(row_max), row_max, 0.0)
    exp = np.where(valid, np.exp(filled - row_max), 0.0)
    total = exp.sum(axis=-1, keepdims=True)
    return np.divide(exp, total, out=np.zeros_like(exp), where=total > 0)


def masked_softmax(scores: Tensor, mask: npt.ArrayLike | None = None) -> Tensor:
    """
    Softmax over the last axis restricted to valid entries.

    Masked entries are exactly 0; a row with no valid entry is all zeros.

    Args:
        scores: Scores of shape (..., n).
        mask: Boolean validity broadcastable to `scores` (True = valid).

    Raises:
        NumericError: If `scores` contains NaN.
    """
    bool_mask = None if mask is None else np.asarray(mask, dtype=bool)
    probs = _softmax_data(scores.data, bool_mask)

    def backward(g: Array) -> tuple[Array]:
        return (probs * (g - np.sum(g * probs, axis=-1, keepdims=True)),)

    return Tensor.from_op(probs, (scores,), backward)


def layer_norm(x: Tensor, gain: Tensor, shift: Tensor, eps: float = LAYER_NORM_EPS) -> Tensor:
    """Normalize the last axis to mean 0 / variance 1, then apply gain and shift."""
    if gain.shape != (x.shape[-1],) or shift.shape != (x.shape[-1],):
        raise DimensionError(
            f"layer_norm gain/shift {gain.shape}/{shift.shape} do not match input {x.shape}"
        )
    data = x.data
    centered = data - data.mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt((centered**2).mean(axis=-1, keepdims=True) + eps)
    normed = centered * inv_std
    gain_data = gain.data

    def backward(g: Array) -> tuple[Array, Array, Array]:
        g_normed = g * gain_data
        g_x = inv_std * (
            g_normed
            - g_normed.mean(axis=-1, keepdims=True)
            - normed * (g_normed * normed).mean(axis=-1, keepdims=True)
        )
        return g_x, g * normed, g

    return Tensor.from_op(normed * gain_data + shift.data, (x, gain, shift), backward)


# --- losses ---


def cross_entropy(
    logits: Tensor, targets: npt.ArrayLike, mask: npt.ArrayLike | None = None
) -> Tensor:
    """
    Mean negative log-likelihood of integer targets under a masked softmax.

    Args:
        logits: Shape (n, k).
        targets: n class indices; each must be a valid entry of its row.
        mask: Optional (n, k) validity.
    """
    target_idx = np.asarray(targets, dtype=np.intp)
    n = logits.shape[0]
    if logits.ndim != 2 or target_idx.shape != (n,):
        raise DimensionError(
            f"cross_entropy expects (n, k) logits and n targets, got {logits.shape} and {target_idx.shape}"
        )
    bool_mask = None if mask is None else np.broadcast_to(np.asarray(mask, dtype=bool), logits.shape)
    rows = np.arange(n)
    if bool_mask is not None and not bool_mask[rows, target_idx].all():
        raise InputError("cross_entropy target points at a masked entry")
    probs = _softmax_data(logits.data, bool_mask)
    picked = probs[rows, target_idx]
    loss = -np.mean(np.log(np.maximum(picked, np.finfo(probs.dtype).tiny)))

    def backward(g: Array) -> tuple[Array]:
        grad = probs.copy()
        grad[rows, target_idx] -= 1.0
        return (grad * (g / n),)

    return Tensor.from_op(np.asarray(loss), (logits,), backward)


def soft_target_kl(
    logits: Tensor,
    target_probs: npt.ArrayLike,
    mask: npt.ArrayLike | None = None,
    temperature: float = 1.0,
) -> Tensor:
    """
    Mean over rows of KL(target ‖ softmax(logits / T)), restricted to valid entries.

    Targets are expected to be distributions over the valid entries.
    """
    targets = np.asarray(target_probs, dtype=logits.data.dtype)
    if targets.shape != logits.shape:
        raise DimensionError(
            f"Soft targets {targets.shape} do not match logits {logits.shape}"
        )
    bool_mask = None if mask is None else np.broadcast_to(np.asarray(mask, dtype=bool), logits.shape)
    probs = _softmax_data(logits.data / temperature, bool_mask)
    rows = int(np.prod(logits.shape[:-1]))
    tiny = np.finfo(probs.dtype).tiny
    support = targets > 0
    terms = np.where(
        support,
        targets * (np.log(np.maximum(targets, tiny)) - np.log(np.maximum(probs, tiny))),
        0.0,
    )
    loss = terms.sum() / rows

    def backward(g: Array) -> tuple[Array]:
        return ((probs - targets) * (g / (temperature * rows)),)

    return Tensor.from_op(np.asarray(loss), (logits,), backward)
