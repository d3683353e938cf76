"""Training objectives: RSS span selection, masked-token denoising, classification."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from littlebird.exceptions import ConfigurationError, InputError
from littlebird.model import BaseEncoder, EncoderModel, Impl, SpanPrediction
from littlebird.numkit import Tensor, ops
from littlebird.posbias import PositionIds
from littlebird.train.rss import RssExample
from littlebird.train.vocab import MASK_ID

IntArray = npt.NDArray[np.int64]


def encode_hidden(
    model: BaseEncoder, tokens: npt.ArrayLike, pos: PositionIds | None, impl: Impl
) -> Tensor:
    """Hidden states from either encoder kind."""
    if isinstance(model, EncoderModel):
        return model.encode(tokens, pos, impl=impl).hidden
    return model.encode(tokens, pos).hidden


def span_prediction(
    model: BaseEncoder,
    example: RssExample,
    impl: Impl = "blocked",
    teacher_forced: bool = True,
) -> SpanPrediction:
    """Span head output for every question of `example`."""
    hidden = encode_hidden(model, example.tokens, example.pos, impl)
    starts = example.starts if teacher_forced else None
    return model.span_head(hidden, example.questions, example.answer_mask, starts=starts)


def rss_loss(prediction: SpanPrediction, example: RssExample) -> Tensor:
    """Start plus conditional-end cross-entropy against the golden spans (teacher-forced start)."""
    start = ops.cross_entropy(prediction.start_logits, example.starts, prediction.start_mask)
    end = ops.cross_entropy(prediction.end_logits, example.ends, prediction.end_mask)
    return start + end


def exact_match(model: BaseEncoder, examples: Iterable[RssExample], impl: Impl = "blocked") -> float:
    """Fraction of questions whose predicted (start, end) equals the golden span."""
    hits = total = 0
    for example in examples:
        spans = span_prediction(model, example, impl, teacher_forced=False).best_spans()
        hits += sum(pred == gold for pred, gold in zip(spans, example.answers, strict=True))
        total += len(example.answers)
    return hits / total if total else 0.0


@dataclass
class MaskedTokens:
    """Corrupted input plus the positions and original ids to predict."""

    tokens: IntArray
    positions: IntArray
    targets: IntArray


def mask_tokens(
    tokens: npt.ArrayLike,
    rng: np.random.Generator,
    prob: float,
    vocab_size: int,
    protected: Iterable[int] = (),
) -> MaskedTokens:
    """
    Masked-token corruption: each unprotected token is selected with `prob`;
    selected tokens become [MASK] 80% of the time, a random word 10% and stay
    unchanged 10%. At least one token is selected when any is eligible.
    """
    if not 0.0 <= prob < 1.0:
        raise ConfigurationError(f"Masking rate must be in [0, 1), got {prob}")
    original = np.asarray(tokens, dtype=np.int64)
    protected_ids = sorted(set(protected))
    eligible = ~np.isin(original, protected_ids)
    chosen = eligible & (rng.random(original.size) < prob)
    if not chosen.any() and eligible.any():
        chosen[rng.choice(np.flatnonzero(eligible))] = True
    corrupted = original.copy()
    roll = rng.random(original.size)
    corrupted[chosen & (roll < 0.8)] = MASK_ID
    swap = chosen & (roll >= 0.8) & (roll < 0.9)
    first_word = max(protected_ids, default=-1) + 1
    if first_word >= vocab_size:
        raise InputError("No unprotected ids to draw random replacements from")
    corrupted[swap] = rng.integers(first_word, vocab_size, size=int(swap.sum()))
    positions = np.flatnonzero(chosen)
    return MaskedTokens(corrupted, positions, original[positions])


def masked_token_loss(
    model: BaseEncoder,
    masked: MaskedTokens,
    pos: PositionIds | None = None,
    impl: Impl = "blocked",
) -> Tensor:
    """Cross-entropy of the token head at the masked positions, read at position ids `pos`."""
    if masked.positions.size == 0:
        raise InputError("No masked positions to predict")
    hidden = encode_hidden(model, masked.tokens, pos, impl)
    logits = model.token_head(ops.take(hidden, masked.positions, axis=0))
    return ops.cross_entropy(logits, masked.targets)


def classification_loss(
    model: BaseEncoder,
    tokens: npt.ArrayLike,
    label: int,
    index: int,
    pos: PositionIds | None = None,
    impl: Impl = "blocked",
) -> tuple[Tensor, int]:
    """Cross-entropy of the classifier head read at `index`, and the predicted class."""
    if model.classifier is None:
        raise ConfigurationError("Model has no classifier head (num_classes = 0)")
    logits = model.classifier(encode_hidden(model, tokens, pos, impl), index)
    return ops.cross_entropy(logits, [label]), int(np.argmax(logits.data[0]))
