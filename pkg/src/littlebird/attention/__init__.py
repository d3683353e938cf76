"""Attention kernels: full, pack and unpack & sliding-window attention."""

from littlebird.attention.geometry import (
    AttentionSpec,
    ScoreAudit,
    SparsityMask,
    allowed_key_counts,
    block_layout,
    build_sparsity_mask,
    complexity_audit,
    dense_score_count,
)
from littlebird.attention.kernels import (
    AttentionResult,
    AttentionWeights,
    full_attention,
    merge_heads,
    pack_attention,
    split_heads,
)
from littlebird.attention.usw import (
    scatter_blocked_probs,
    usw_attention_blocked,
    usw_attention_dense,
)

__all__ = [
    "AttentionResult",
    "AttentionSpec",
    "AttentionWeights",
    "ScoreAudit",
    "SparsityMask",
    "allowed_key_counts",
    "block_layout",
    "build_sparsity_mask",
    "complexity_audit",
    "dense_score_count",
    "full_attention",
    "merge_heads",
    "pack_attention",
    "scatter_blocked_probs",
    "split_heads",
    "usw_attention_blocked",
    "usw_attention_dense",
]
