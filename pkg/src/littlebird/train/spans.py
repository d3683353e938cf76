"""Recurring span discovery."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from littlebird.exceptions import InputError


@dataclass(frozen=True)
class SpanCluster:
    """
    One recurring span and its non-overlapping occurrences.

    Occurrences are inclusive (start, end) index pairs in ascending order.
    """

    tokens: tuple[int, ...]
    occurrences: tuple[tuple[int, int], ...]

    @property
    def length(self) -> int:
        return len(self.tokens)


def find_recurring_spans(
    tokens: Sequence[int],
    min_len: int = 2,
    budget: int | None = None,
    exclude: Iterable[int] = (),
) -> list[SpanCluster]:
    """
    Longest-first greedy selection of recurring spans.

    For each length from len(tokens)//2 down to `min_len`, candidate windows
    are visited left to right. A window that is still free and whose n-gram
    has not been tried at this length collects every free occurrence of the
    n-gram, left to right and non-overlapping; two or more occurrences form
    a cluster and their positions stop being free.

    Args:
        tokens: Document token ids.
        min_len: Shortest span length (>= 2).
        budget: Maximum number of clusters.
        exclude: Token ids no span may contain (specials, sentence enders).

    Returns:
        Clusters in selection order.
    """
    if min_len < 2:
        raise InputError(f"Recurring spans need min_len >= 2, got {min_len}")
    seq = [int(t) for t in tokens]
    excluded = set(exclude)
    free = [t not in excluded for t in seq]
    clusters: list[SpanCluster] = []
    limit = budget if budget is not None else len(seq)
    if limit <= 0:
        return clusters

    for length in range(len(seq) // 2, min_len - 1, -1):
        starts: dict[tuple[int, ...], list[int]] = defaultdict(list)
        for i in range(len(seq) - length + 1):
            starts[tuple(seq[i : i + length])].append(i)
        tried: set[tuple[int, ...]] = set()
        for i in range(len(seq) - length + 1):
            if not all(free[i : i + length]):
                continue
            gram = tuple(seq[i : i + length])
            if gram in tried:
                continue
            tried.add(gram)
            found: list[tuple[int, int]] = []
            next_open = 0
            for j in starts[gram]:
                if j >= next_open and all(free[j : j + length]):
                    found.append((j, j + length - 1))
                    next_open = j + length
            if len(found) < 2:
                continue
            for start, end in found:
                for k in range(start, end + 1):
                    free[k] = False
            clusters.append(SpanCluster(gram, tuple(found)))
            if len(clusters) >= limit:
                return clusters
    return clusters
