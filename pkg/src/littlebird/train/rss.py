"""Recurring Span Selection examples."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace

import numpy as np
import numpy.typing as npt

from littlebird.exceptions import InputError
from littlebird.posbias import PositionIds
from littlebird.train.spans import SpanCluster
from littlebird.train.vocab import QUESTION_ID

IntArray = npt.NDArray[np.int64]
BoolArray = npt.NDArray[np.bool_]


@dataclass
class RssExample:
    """
    A document with all but one occurrence of each recurring span replaced by
    a single [QUESTION] token.

    Attributes:
        tokens: Token ids after replacement.
        questions: Index of each [QUESTION] sentinel.
        answers: Golden inclusive (start, end) span for each sentinel.
        answer_mask: Positions an answer may cover.
        pos: Position ids, remapped when Padding Insertion is applied.
    """

    tokens: IntArray
    questions: list[int]
    answers: list[tuple[int, int]]
    answer_mask: BoolArray
    pos: PositionIds = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.pos is None:
            self.pos = PositionIds.arange(len(self.tokens))
        if len(self.questions) != len(self.answers):
            raise InputError("Every question needs exactly one answer")

    def __len__(self) -> int:
        return int(self.tokens.size)

    @property
    def starts(self) -> list[int]:
        return [start for start, _ in self.answers]

    @property
    def ends(self) -> list[int]:
        return [end for _, end in self.answers]

    def with_positions(self, pos: PositionIds) -> RssExample:
        return replace(self, pos=pos)


def make_rss_example(
    tokens: Sequence[int],
    clusters: Iterable[SpanCluster],
    rng: np.random.Generator,
    protected: Iterable[int] = (),
) -> RssExample:
    """
    Build an RSS example from a document and its recurring spans.

    Per cluster one occurrence, chosen uniformly, stays as the golden answer;
    every other occurrence collapses into one [QUESTION] token. Offsets of
    the surviving tokens are recomputed.

    Args:
        tokens: Document token ids.
        clusters: Output of `find_recurring_spans` on `tokens`.
        rng: Generator for the golden choice.
        protected: Token ids that may never be part of an answer.
    """
    seq = [int(t) for t in tokens]
    replaced: dict[int, tuple[int, int]] = {}
    golden: list[tuple[int, int]] = []
    for cluster_index, cluster in enumerate(clusters):
        keep = int(rng.integers(len(cluster.occurrences)))
        golden.append(cluster.occurrences[keep])
        for k, (start, end) in enumerate(cluster.occurrences):
            if k != keep:
                replaced[start] = (end, cluster_index)

    new_tokens: list[int] = []
    new_index: dict[int, int] = {}
    question_of: list[tuple[int, int]] = []
    i = 0
    while i < len(seq):
        if i in replaced:
            end, cluster_index = replaced[i]
            question_of.append((len(new_tokens), cluster_index))
            new_tokens.append(QUESTION_ID)
            i = end + 1
            continue
        new_index[i] = len(new_tokens)
        new_tokens.append(seq[i])
        i += 1

    questions = [position for position, _ in question_of]
    answers = [
        (new_index[golden[c][0]], new_index[golden[c][1]]) for _, c in question_of
    ]
    token_array = np.asarray(new_tokens, dtype=np.int64)
    blocked = set(protected) | {QUESTION_ID}
    answer_mask = ~np.isin(token_array, sorted(blocked))
    return RssExample(token_array, questions, answers, answer_mask)
