"""Encoder layers: the LittleBird layer and the dense baseline layer."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from littlebird.attention import (
    AttentionResult,
    AttentionSpec,
    AttentionWeights,
    ScoreAudit,
    full_attention,
    pack_attention,
    usw_attention_blocked,
    usw_attention_dense,
)
from littlebird.config import ModelConfig
from littlebird.numkit import FeedForward, LayerNorm, ParamStore, Tensor
from littlebird.posbias import BiasSlopes, PositionIds, bialibi_distance

Impl = Literal["dense", "blocked"]


@dataclass
class LayerOutput:
    """Hidden states after one layer, the propagated pack and the attention used."""

    hidden: Tensor
    pack: Tensor | None
    attention: AttentionResult
    pack_attention: AttentionResult | None = None


class LittleBirdLayer:
    """
    Pack attention, unpack & sliding-window attention and a feed-forward block.

        C_P = Attn(P, X)            P' = LN(C_P + P)
        C_X = USWAttn(X, C_P)       A  = LN(C_X + X)
                                    X' = LN(FFN(A) + A)

    With pack size 0 the pack machinery is absent and the layer is the
    window-plus-global-block model.
    """

    def __init__(
        self, store: ParamStore, name: str, config: ModelConfig, rng: np.random.Generator
    ) -> None:
        """
        Args:
            store: Registry for the layer's parameters.
            name: Parameter name prefix, e.g. "layers.0".
            config: Model shape.
            rng: Generator for parameter init.
        """
        d = config.d_model
        self.spec = AttentionSpec.from_model_config(config)
        self.pack: AttentionWeights | None = None
        self.pack_norm: LayerNorm | None = None
        if config.pack_size:
            self.pack = AttentionWeights(store, f"{name}.pack", d, rng, config.init_std)
            self.pack_norm = LayerNorm(store, f"{name}.pack_norm", d)
        self.unpack = AttentionWeights(store, f"{name}.unpack", d, rng, config.init_std)
        self.attn_norm = LayerNorm(store, f"{name}.attn_norm", d)
        self.ffn = FeedForward(
            store, f"{name}.ffn", d, rng, config.ffn_multiplier, config.init_std
        )
        self.ffn_norm = LayerNorm(store, f"{name}.ffn_norm", d)
        self.slopes = BiasSlopes.create(store, f"{name}.slopes", config.heads)

    def __call__(
        self,
        x: Tensor,
        pack: Tensor | None,
        pos: PositionIds,
        impl: Impl = "blocked",
        audit: ScoreAudit | None = None,
    ) -> LayerOutput:
        """layer_forward: returns (X', P') plus the attention probabilities."""
        packed_result: AttentionResult | None = None
        packed: Tensor | None = None
        new_pack: Tensor | None = None
        if self.pack is not None and self.pack_norm is not None and pack is not None:
            packed_result = pack_attention(
                pack, x, self.pack, self.spec.heads, key_mask=pos.real, audit=audit
            )
            packed = packed_result.output
            new_pack = self.pack_norm(packed + pack)

        usw = usw_attention_blocked if impl == "blocked" else usw_attention_dense
        unpacked = usw(x, packed, pos, self.slopes, self.spec, self.unpack, audit=audit)
        mixed = self.attn_norm(unpacked.output + x)
        hidden = self.ffn_norm(self.ffn(mixed) + mixed)
        return LayerOutput(hidden, new_pack, unpacked, packed_result)


class DenseLayer:
    """Standard encoder layer with full BiALiBi-biased self-attention."""

    def __init__(
        self, store: ParamStore, name: str, config: ModelConfig, rng: np.random.Generator
    ) -> None:
        d = config.d_model
        self.heads = config.heads
        self.attention = AttentionWeights(store, f"{name}.attention", d, rng, config.init_std)
        self.attn_norm = LayerNorm(store, f"{name}.attn_norm", d)
        self.ffn = FeedForward(
            store, f"{name}.ffn", d, rng, config.ffn_multiplier, config.init_std
        )
        self.ffn_norm = LayerNorm(store, f"{name}.ffn_norm", d)
        self.slopes = BiasSlopes.create(store, f"{name}.slopes", config.heads)

    def __call__(
        self, x: Tensor, pos: PositionIds, audit: ScoreAudit | None = None
    ) -> LayerOutput:
        attended = full_attention(
            x,
            x,
            self.attention,
            self.heads,
            bias=bialibi_distance(pos, self.slopes),
            key_mask=pos.real,
            audit=audit,
        )
        mixed = self.attn_norm(attended.output + x)
        hidden = self.ffn_norm(self.ffn(mixed) + mixed)
        return LayerOutput(hidden, None, attended)
