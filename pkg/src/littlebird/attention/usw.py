"""Unpack & sliding-window attention (USWAttn).

Each token attends the packed context C_P plus its own block, the two
neighboring blocks and the global block 0, with scores biased by
[D_P; D]ᵀ. `usw_attention_dense` materializes the full l × (s + l) score
matrix and is the reference; `usw_attention_blocked` gathers only the
s + 4b keys of each query block.
"""

from __future__ import annotations

import math

import numpy as np

from littlebird.attention.geometry import (
    KEY_SLOTS,
    AttentionSpec,
    ScoreAudit,
    block_layout,
    build_sparsity_mask,
)
from littlebird.attention.kernels import AttentionResult, AttentionWeights, merge_heads, split_heads
from littlebird.exceptions import DimensionError
from littlebird.numkit import Tensor, ops
from littlebird.numkit.tensor import Array
from littlebird.posbias import (
    BiasSlopes,
    PositionIds,
    bialibi_distance,
    bias_from_geometry,
    distance_geometry,
    pack_distance,
)


def _check_inputs(
    x: Tensor, packed: Tensor | None, pos: PositionIds, spec: AttentionSpec
) -> None:
    if x.ndim != 2 or x.shape[1] != spec.model_dim:
        raise DimensionError(
            f"Expected X of shape (l, {spec.model_dim}), got {x.shape}", shape=x.shape
        )
    if len(pos) != x.shape[0]:
        raise DimensionError(
            f"{len(pos)} position ids for {x.shape[0]} tokens", ids=len(pos), tokens=x.shape[0]
        )
    expected_pack = (spec.pack_size, spec.model_dim)
    if spec.pack_size and (packed is None or packed.shape != expected_pack):
        raise DimensionError(
            f"Expected packed context of shape {expected_pack}, got "
            f"{None if packed is None else packed.shape}"
        )


def usw_attention_dense(
    x: Tensor,
    packed: Tensor | None,
    pos: PositionIds,
    slopes: BiasSlopes,
    spec: AttentionSpec,
    weights: AttentionWeights,
    audit: ScoreAudit | None = None,
) -> AttentionResult:
    """
    Reference USWAttn over the full l × (s + l) score matrix.

    Pack keys are always visible; X keys follow the sparsity mask and the
    real-token flags of `pos`. The softmax runs jointly over both.

    Returns:
        AttentionResult with probs of shape (H, l, s + l), pack columns first.
    """
    _check_inputs(x, packed, pos, spec)
    length, s = x.shape[0], spec.pack_size
    mask = build_sparsity_mask(spec, length).with_key_validity(pos.real)

    key_rows = [packed, x] if s else [x]
    context = ops.concat(key_rows, axis=0)
    q = split_heads(weights.query(x), spec.heads)
    k = split_heads(weights.key(context), spec.heads)
    v = split_heads(weights.value(context), spec.heads)
    scores = ops.scale(q @ k.T, 1.0 / math.sqrt(spec.head_dim))

    distance = bialibi_distance(pos, slopes)
    if s:
        pack_bias = ops.swap_last(pack_distance(s, length, slopes, spec.block_size))
        distance = ops.concat([pack_bias, distance], axis=-1)
    if distance.shape != scores.shape:
        raise DimensionError(
            f"Distance shape {distance.shape} does not match scores {scores.shape}"
        )
    if audit is not None:
        audit.add(length * (s + length))
    probs = ops.masked_softmax(scores - distance, mask.joint())
    return AttentionResult(weights.output(merge_heads(probs @ v)), probs)


def usw_attention_blocked(
    x: Tensor,
    packed: Tensor | None,
    pos: PositionIds,
    slopes: BiasSlopes,
    spec: AttentionSpec,
    weights: AttentionWeights,
    audit: ScoreAudit | None = None,
) -> AttentionResult:
    """
    Block-batched USWAttn, numerically equal to `usw_attention_dense`.

    For query block j the keys are [pack; block 0; block j−1; block j;
    block j+1]. Slots that fall off either end of the sequence, or that
    repeat block 0 for j < 2, are masked.

    Returns:
        AttentionResult with probs of shape (H, nb, b, s + 4b).

    Raises:
        DimensionError: If l is not a multiple of the block size.
    """
    _check_inputs(x, packed, pos, spec)
    length, s, b, heads = x.shape[0], spec.pack_size, spec.block_size, spec.heads
    num_blocks = spec.num_blocks(length)
    index, valid = block_layout(num_blocks)
    window = KEY_SLOTS * b

    def blocks(t: Tensor) -> Tensor:
        return split_heads(t, heads).reshape(heads, num_blocks, b, spec.head_dim)

    def gather(t: Tensor) -> Tensor:
        # (H, nb, b, d_h) -> (H, nb, 4b, d_h)
        return ops.take(t, index, axis=1).reshape(heads, num_blocks, window, spec.head_dim)

    scale = 1.0 / math.sqrt(spec.head_dim)
    q = blocks(weights.query(x))
    k = gather(blocks(weights.key(x)))
    v = gather(blocks(weights.value(x)))

    ids = pos.ids.reshape(num_blocks, b)
    key_ids = ids[index].reshape(num_blocks, window)
    window_bias = bias_from_geometry(distance_geometry(ids, key_ids), slopes)
    window_scores = ops.scale(q @ k.T, scale) - window_bias

    key_valid = (pos.real.reshape(num_blocks, b)[index] & valid[:, :, None]).reshape(
        num_blocks, window
    )
    if s:
        assert packed is not None
        pack_k = split_heads(weights.key(packed), heads).reshape(heads, 1, s, spec.head_dim)
        pack_v = split_heads(weights.value(packed), heads).reshape(heads, 1, s, spec.head_dim)
        pack_bias = pack_distance(s, 1, slopes, b).reshape(heads, 1, 1, s)
        pack_scores = ops.scale(q @ pack_k.T, scale) - pack_bias
        scores = ops.concat([pack_scores, window_scores], axis=-1)
        key_valid = np.concatenate([np.ones((num_blocks, s), dtype=bool), key_valid], axis=1)
    else:
        scores = window_scores

    if audit is not None:
        audit.add(num_blocks * b * (s + window))
    probs = ops.masked_softmax(scores, key_valid[:, None, :])

    mixed = ops.narrow(probs, -1, s, s + window) @ v
    if s:
        mixed = mixed + ops.narrow(probs, -1, 0, s) @ pack_v
    out = mixed.reshape(heads, length, spec.head_dim)
    return AttentionResult(weights.output(merge_heads(out)), probs)


def scatter_blocked_probs(probs: Array, spec: AttentionSpec) -> Array:
    """
    Blocked probabilities (H, nb, b, s + 4b) in the dense (H, l, s + l) layout.

    Masked slots carry zero probability, so only valid slots are copied.
    """
    heads, num_blocks, b, width = probs.shape
    s = spec.pack_size
    if b != spec.block_size or width != s + KEY_SLOTS * b:
        raise DimensionError(f"Blocked probabilities {probs.shape} do not match {spec}")
    length = num_blocks * b
    index, valid = block_layout(num_blocks)
    dense = np.zeros((heads, num_blocks, b, s + length), dtype=probs.dtype)
    dense[..., :s] = probs[..., :s]
    for j in range(num_blocks):
        for slot in range(KEY_SLOTS):
            if not valid[j, slot]:
                continue
            start = s + int(index[j, slot]) * b
            src = s + slot * b
            dense[:, j, :, start : start + b] += probs[:, j, :, src : src + b]
    return dense.reshape(heads, length, s + length)
