"""Task heads over encoder hidden states."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from littlebird.exceptions import DimensionError, InputError
from littlebird.numkit import LinearMap, ParamStore, Tensor, ops

BoolArray = npt.NDArray[np.bool_]
IntArray = npt.NDArray[np.int64]


class TokenHead:
    """Vocabulary logits per position (masked-token prediction)."""

    def __init__(
        self,
        store: ParamStore,
        name: str,
        dim: int,
        vocab_size: int,
        rng: np.random.Generator,
        init_std: float = 0.02,
    ) -> None:
        self.projection = LinearMap(store, f"{name}.projection", dim, vocab_size, rng, init_std)

    def __call__(self, hidden: Tensor) -> Tensor:
        return self.projection(hidden)

    def copy_from(self, other: TokenHead) -> None:
        self.projection.copy_from(other.projection)


class ClassifierHead:
    """Class logits read from a single position."""

    def __init__(
        self,
        store: ParamStore,
        name: str,
        dim: int,
        num_classes: int,
        rng: np.random.Generator,
        init_std: float = 0.02,
    ) -> None:
        self.projection = LinearMap(store, f"{name}.projection", dim, num_classes, rng, init_std)

    def __call__(self, hidden: Tensor, index: int = 0) -> Tensor:
        """Logits of shape (1, num_classes) from row `index`."""
        if not 0 <= index < hidden.shape[0]:
            raise InputError(f"Classifier index {index} outside {hidden.shape[0]} positions")
        return self.projection(ops.narrow(hidden, 0, index, index + 1))

    def copy_from(self, other: ClassifierHead) -> None:
        self.projection.copy_from(other.projection)


@dataclass
class SpanPrediction:
    """
    Start and conditional end logits, one row per question.

    Attributes:
        start_logits: (q, l) start scores.
        end_logits: (q, l) end scores given `starts`.
        start_mask: (q, l) positions a start may take.
        end_mask: (q, l) positions an end may take (valid and not before the start).
        starts: Start index each end row is conditioned on.
    """

    start_logits: Tensor
    end_logits: Tensor
    start_mask: BoolArray
    end_mask: BoolArray
    starts: IntArray

    def start_probs(self) -> npt.NDArray[np.float64]:
        return ops.masked_softmax(self.start_logits.detach(), self.start_mask).data

    def end_probs(self) -> npt.NDArray[np.float64]:
        return ops.masked_softmax(self.end_logits.detach(), self.end_mask).data

    def best_spans(self) -> list[tuple[int, int]]:
        """(start, argmax end) per question."""
        ends = np.where(self.end_mask, self.end_logits.data, -np.inf).argmax(axis=1)
        return [(int(s), int(e)) for s, e in zip(self.starts, ends, strict=True)]


class SpanHead:
    """
    Question-conditioned span pointer.

    The start score of position i for question q is h_i · W_s h_q. The end
    score of candidate j is g(h_start, h_j) · h_q where g is a two-layer gelu
    network over the concatenated start and candidate representations, so the
    end depends on the chosen start.
    """

    def __init__(
        self,
        store: ParamStore,
        name: str,
        dim: int,
        rng: np.random.Generator,
        init_std: float = 0.02,
    ) -> None:
        self.dim = dim
        self.start = LinearMap(store, f"{name}.start", dim, dim, rng, init_std, bias=False)
        # the first end layer acts on [h_start; h_j], split into its two halves
        self.end_start = LinearMap(store, f"{name}.end_start", dim, dim, rng, init_std)
        self.end_candidate = LinearMap(
            store, f"{name}.end_candidate", dim, dim, rng, init_std, bias=False
        )
        self.end_output = LinearMap(store, f"{name}.end_output", dim, dim, rng, init_std)

    def __call__(
        self,
        hidden: Tensor,
        question_positions: Sequence[int],
        valid: npt.ArrayLike,
        starts: Sequence[int] | None = None,
    ) -> SpanPrediction:
        """
        Score starts, then ends conditioned on one start per question.

        Args:
            hidden: Encoder output (l, d).
            question_positions: Index of each [QUESTION] sentinel.
            valid: (l,) positions an answer may cover.
            starts: Teacher-forced start per question; argmax start when omitted.

        Raises:
            InputError: With no questions or no valid position.
        """
        length = hidden.shape[0]
        questions = np.asarray(question_positions, dtype=np.int64)
        valid_mask = np.asarray(valid, dtype=bool)
        if questions.size == 0:
            raise InputError("Span head needs at least one question position")
        if valid_mask.shape != (length,):
            raise DimensionError(f"valid mask {valid_mask.shape} does not match length {length}")
        if not valid_mask.any():
            raise InputError("No valid answer positions")
        if questions.min() < 0 or questions.max() >= length:
            raise InputError("Question position outside the sequence")

        scale = 1.0 / math.sqrt(self.dim)
        h_q = ops.take(hidden, questions, axis=0)
        start_logits = ops.scale(h_q @ self.start(hidden).T, scale)
        start_mask = np.broadcast_to(valid_mask, (questions.size, length)).copy()

        if starts is None:
            chosen = np.where(start_mask, start_logits.data, -np.inf).argmax(axis=1)
        else:
            chosen = np.asarray(starts, dtype=np.int64)
            if chosen.shape != questions.shape:
                raise DimensionError(f"{chosen.size} starts for {questions.size} questions")
            if chosen.min() < 0 or chosen.max() >= length:
                raise InputError("Start position outside the sequence")

        h_start = ops.take(hidden, chosen, axis=0).reshape(questions.size, 1, self.dim)
        joint = ops.gelu(self.end_start(h_start) + self.end_candidate(hidden))
        scored = self.end_output(joint) * h_q.reshape(questions.size, 1, self.dim)
        end_logits = ops.scale(ops.sum(scored, axis=-1), scale)
        end_mask = start_mask & (np.arange(length)[None, :] >= chosen[:, None])
        return SpanPrediction(start_logits, end_logits, start_mask, end_mask, chosen)

    def copy_from(self, other: SpanHead) -> None:
        for mine, theirs in (
            (self.start, other.start),
            (self.end_start, other.end_start),
            (self.end_candidate, other.end_candidate),
            (self.end_output, other.end_output),
        ):
            mine.copy_from(theirs)
