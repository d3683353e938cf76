"""Encoder stacks: LittleBird and the dense baseline.

Neither model has a positional embedding table; all position information
enters through the BiALiBi distances computed from position ids.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np
import numpy.typing as npt

from littlebird.attention import AttentionSpec, ScoreAudit
from littlebird.config import ModelConfig
from littlebird.exceptions import ConfigurationError, DimensionError, InputError
from littlebird.logging import get_logger
from littlebird.model.heads import ClassifierHead, SpanHead, TokenHead
from littlebird.model.layers import DenseLayer, Impl, LayerOutput, LittleBirdLayer
from littlebird.numkit import ParamStore, Tensor, ops
from littlebird.posbias import PositionIds

logger = get_logger(__name__)

PAD_TOKEN_ID = 0


@dataclass
class EncoderOutput:
    """
    Final hidden states for the input tokens.

    `layers` is filled only when the caller asks to collect per-layer
    outputs; their attention probabilities cover the block-padded length.
    """

    hidden: Tensor
    layers: list[LayerOutput] = field(default_factory=list)
    padded_length: int = 0


class BaseEncoder(ABC):
    """Shared embedding, task heads and parameter registry."""

    kind: ClassVar[str] = "base"

    def __init__(self, config: ModelConfig, seed: int = 0) -> None:
        """
        Args:
            config: Model shape.
            seed: Seed for the PCG64 generator used for init.
        """
        self.config = config
        self.store = ParamStore()
        self._rng = np.random.default_rng(seed)
        self.embedding = self.store.register(
            "embedding",
            Tensor(self._rng.normal(0.0, config.init_std, size=(config.vocab_size, config.d_model))),
        )

    def _build_heads(self) -> None:
        cfg, rng = self.config, self._rng
        self.token_head = TokenHead(
            self.store, "heads.token", cfg.d_model, cfg.vocab_size, rng, cfg.init_std
        )
        self.span_head = SpanHead(self.store, "heads.span", cfg.d_model, rng, cfg.init_std)
        self.classifier: ClassifierHead | None = None
        if cfg.num_classes:
            self.classifier = ClassifierHead(
                self.store, "heads.classifier", cfg.d_model, cfg.num_classes, rng, cfg.init_std
            )

    def embed(self, tokens: npt.ArrayLike) -> Tensor:
        """Embedding rows scaled by √d."""
        ids = _token_ids(tokens, self.config.vocab_size)
        return ops.scale(ops.take(self.embedding, ids, axis=0), math.sqrt(self.config.d_model))

    def _positions(self, length: int, pos: PositionIds | None) -> PositionIds:
        if pos is None:
            return PositionIds.arange(length)
        if len(pos) != length:
            raise InputError(f"{len(pos)} position ids for {length} tokens")
        return pos

    @abstractmethod
    def encode(
        self,
        tokens: npt.ArrayLike,
        pos: PositionIds | None = None,
        *,
        audit: ScoreAudit | None = None,
        collect: bool = False,
    ) -> EncoderOutput:
        """Hidden states for `tokens` at position ids `pos` (default 0..l-1)."""

    def num_parameters(self) -> int:
        return self.store.num_elements()

    def copy_heads_from(self, other: BaseEncoder) -> None:
        self.token_head.copy_from(other.token_head)
        self.span_head.copy_from(other.span_head)
        if self.classifier is not None and other.classifier is not None:
            self.classifier.copy_from(other.classifier)


class EncoderModel(BaseEncoder):
    """
    LittleBird encoder: embeddings, a trainable initial pack P₀ and N layers.

    Each layer consumes the pack produced by the previous one. Inputs are
    padded with [PAD] to a multiple of the block size; padded tokens are not
    real keys and are dropped from the returned hidden states.
    """

    kind = "littlebird"

    def __init__(self, config: ModelConfig, seed: int = 0) -> None:
        super().__init__(config, seed)
        self.spec = AttentionSpec.from_model_config(config)
        self.pack_init: Tensor | None = None
        if config.pack_size:
            self.pack_init = self.store.register(
                "pack.initial",
                Tensor(self._rng.normal(0.0, config.pack_init_std, size=(config.pack_size, config.d_model))),
            )
        self.layers = [
            LittleBirdLayer(self.store, f"layers.{i}", config, self._rng)
            for i in range(config.layers)
        ]
        self._build_heads()
        logger.debug(
            "encoder_built", kind=self.kind, parameters=self.num_parameters(), layers=config.layers
        )

    def encode(
        self,
        tokens: npt.ArrayLike,
        pos: PositionIds | None = None,
        *,
        impl: Impl = "blocked",
        audit: ScoreAudit | None = None,
        collect: bool = False,
    ) -> EncoderOutput:
        """
        Run the stack.

        Args:
            tokens: Token ids, length l.
            pos: Position ids (defaults to 0..l−1); non-real tokens are masked keys.
            impl: "blocked" or the dense reference USW path.
            audit: Receives every score entry computed.
            collect: Keep each layer's output and attention probabilities.

        Raises:
            InputError: On unknown token ids or mismatched position ids.
        """
        ids = _token_ids(tokens, self.config.vocab_size)
        length = ids.size
        pos = self._positions(length, pos)
        padded = self.spec.padded_length(length)
        if padded != length:
            ids = np.concatenate([ids, np.full(padded - length, PAD_TOKEN_ID, dtype=np.int64)])
            pos = pos.padded_to(padded)

        x = self.embed(ids)
        pack = self.pack_init
        collected: list[LayerOutput] = []
        for layer in self.layers:
            out = layer(x, pack, pos, impl=impl, audit=audit)
            x, pack = out.hidden, out.pack
            if collect:
                collected.append(out)
        if padded != length:
            x = ops.narrow(x, 0, 0, length)
        return EncoderOutput(x, collected, padded)


class DenseEncoder(BaseEncoder):
    """Quadratic baseline: full BiALiBi self-attention in every layer."""

    kind = "dense"

    def __init__(self, config: ModelConfig, seed: int = 0) -> None:
        super().__init__(config, seed)
        self.layers = [
            DenseLayer(self.store, f"layers.{i}", config, self._rng) for i in range(config.layers)
        ]
        self._build_heads()
        logger.debug(
            "encoder_built", kind=self.kind, parameters=self.num_parameters(), layers=config.layers
        )

    def encode(
        self,
        tokens: npt.ArrayLike,
        pos: PositionIds | None = None,
        *,
        audit: ScoreAudit | None = None,
        collect: bool = False,
    ) -> EncoderOutput:
        """dense_baseline_forward over all token pairs."""
        ids = _token_ids(tokens, self.config.vocab_size)
        pos = self._positions(ids.size, pos)
        x = self.embed(ids)
        collected: list[LayerOutput] = []
        for layer in self.layers:
            out = layer(x, pos, audit=audit)
            x = out.hidden
            if collect:
                collected.append(out)
        return EncoderOutput(x, collected, ids.size)


def init_student_from_teacher(student: EncoderModel, teacher: DenseEncoder) -> None:
    """
    Warm-start a LittleBird model from a dense one.

    Embeddings, norms, FFNs, slopes and heads are copied; both the pack and
    the unpack projections of every layer start as copies of the teacher's
    attention projections. P₀ and the pack norms keep their fresh init.

    Raises:
        ConfigurationError: If widths, head counts, layer counts or vocabularies differ.
    """
    s_cfg, t_cfg = student.config, teacher.config
    for attr in ("vocab_size", "d_model", "heads", "layers", "num_classes"):
        if getattr(s_cfg, attr) != getattr(t_cfg, attr):
            raise ConfigurationError(
                f"Student and teacher differ in {attr}",
                student=getattr(s_cfg, attr),
                teacher=getattr(t_cfg, attr),
            )
    student.embedding.data[...] = teacher.embedding.data
    for mine, theirs in zip(student.layers, teacher.layers, strict=True):
        if mine.pack is not None:
            mine.pack.copy_from(theirs.attention)
        mine.unpack.copy_from(theirs.attention)
        mine.attn_norm.copy_from(theirs.attn_norm)
        mine.ffn.copy_from(theirs.ffn)
        mine.ffn_norm.copy_from(theirs.ffn_norm)
        mine.slopes.copy_from(theirs.slopes)
    student.copy_heads_from(teacher)
    logger.info("student_initialized", layers=len(student.layers))


def _token_ids(tokens: npt.ArrayLike, vocab_size: int) -> npt.NDArray[np.int64]:
    ids = np.asarray(tokens)
    if ids.ndim != 1:
        raise DimensionError(f"Expected a 1-D token sequence, got shape {ids.shape}")
    if ids.size == 0:
        raise InputError("Empty token sequence")
    if not np.issubdtype(ids.dtype, np.integer):
        raise InputError(f"Token ids must be integers, got {ids.dtype}")
    bad = (ids < 0) | (ids >= vocab_size)
    if bad.any():
        index = int(np.argmax(bad))
        raise InputError(
            f"Unknown token id {int(ids[index])} at index {index}", vocab_size=vocab_size
        )
    return ids.astype(np.int64)
