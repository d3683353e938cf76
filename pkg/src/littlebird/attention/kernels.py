"""Multi-head attention and pack attention."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from littlebird.attention.geometry import ScoreAudit
from littlebird.exceptions import DimensionError, InputError
from littlebird.numkit import LinearMap, ParamStore, Tensor, ops


class AttentionWeights:
    """Query, key, value and output projections of one attention block."""

    def __init__(
        self,
        store: ParamStore,
        name: str,
        dim: int,
        rng: np.random.Generator,
        init_std: float = 0.02,
    ) -> None:
        """
        Args:
            store: Registry the projections are added to.
            name: Parameter name prefix.
            dim: Model width d.
            rng: Generator for weight init.
            init_std: Std of the normal weight init.
        """
        self.dim = dim
        self.query = LinearMap(store, f"{name}.query", dim, dim, rng, init_std)
        self.key = LinearMap(store, f"{name}.key", dim, dim, rng, init_std)
        self.value = LinearMap(store, f"{name}.value", dim, dim, rng, init_std)
        self.output = LinearMap(store, f"{name}.output", dim, dim, rng, init_std)

    def copy_from(self, other: AttentionWeights) -> None:
        for mine, theirs in (
            (self.query, other.query),
            (self.key, other.key),
            (self.value, other.value),
            (self.output, other.output),
        ):
            mine.copy_from(theirs)


@dataclass
class AttentionResult:
    """
    Output rows and the probabilities that produced them.

    `probs` is (H, l, m) for full and dense USW attention and
    (H, nb, b, s + 4b) for the blocked kernel.
    """

    output: Tensor
    probs: Tensor


def split_heads(x: Tensor, heads: int) -> Tensor:
    """(n, d) -> (H, n, d/H)."""
    n, d = x.shape
    if d % heads:
        raise DimensionError(f"Width {d} is not divisible by {heads} heads")
    return ops.transpose(x.reshape(n, heads, d // heads), (1, 0, 2))


def merge_heads(x: Tensor) -> Tensor:
    """(H, n, d_h) -> (n, H·d_h)."""
    heads, n, head_dim = x.shape
    return ops.transpose(x, (1, 0, 2)).reshape(n, heads * head_dim)


def full_attention(
    x: Tensor,
    context: Tensor,
    weights: AttentionWeights,
    heads: int,
    bias: Tensor | None = None,
    key_mask: npt.ArrayLike | None = None,
    audit: ScoreAudit | None = None,
) -> AttentionResult:
    """
    Attn(X, C): per head softmax(Q Kᵀ / √d_h − D) V, heads merged then projected.

    Args:
        x: Queries, shape (l, d).
        context: Keys and values, shape (m, d).
        weights: Projections.
        heads: Head count H.
        bias: Distance matrix D of shape (H, l, m), subtracted from the scores.
        key_mask: Validity of the m keys, or an (l, m) pair mask.
        audit: Receives l·m score entries.
    """
    if x.ndim != 2 or context.ndim != 2 or x.shape[1] != context.shape[1]:
        raise DimensionError(
            f"Attention inputs must be (l, d) and (m, d), got {x.shape} and {context.shape}"
        )
    length, keys = x.shape[0], context.shape[0]
    q = split_heads(weights.query(x), heads)
    k = split_heads(weights.key(context), heads)
    v = split_heads(weights.value(context), heads)
    scores = ops.scale(q @ k.T, 1.0 / math.sqrt(q.shape[-1]))
    if bias is not None:
        if bias.shape != scores.shape:
            raise DimensionError(
                f"Bias shape {bias.shape} does not match scores {scores.shape}",
                bias=bias.shape,
                scores=scores.shape,
            )
        scores = scores - bias
    if audit is not None:
        audit.add(length * keys)
    probs = ops.masked_softmax(scores, key_mask)
    return AttentionResult(weights.output(merge_heads(probs @ v)), probs)


def pack_attention(
    pack: Tensor,
    x: Tensor,
    weights: AttentionWeights,
    heads: int,
    key_mask: npt.ArrayLike | None = None,
    audit: ScoreAudit | None = None,
) -> AttentionResult:
    """C_P = Attn(P, X): the s pack rows attend every valid token, without distance bias."""
    if pack.shape[0] < 1:
        raise InputError("Pack attention needs at least one pack row")
    return full_attention(pack, x, weights, heads, key_mask=key_mask, audit=audit)
