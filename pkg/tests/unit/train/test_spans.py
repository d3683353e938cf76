"""Unit tests for recurring span discovery and RSS examples."""

import numpy as np
import pytest

from littlebird.checks import brute_force_recurring_spans
from littlebird.exceptions import InputError
from littlebird.train import SpanCluster, find_recurring_spans, make_rss_example
from littlebird.train.vocab import QUESTION_ID


class TestFindRecurringSpans:
    """Tests for longest-first span selection."""

    def test_longest_span_wins(self) -> None:
        """Should extend 'a b' to the longer repeat 'a b c'."""
        a, b, c = 10, 11, 12

        clusters = find_recurring_spans([a, b, c, a, b, c], min_len=2)

        assert clusters == [SpanCluster((a, b, c), ((0, 2), (3, 5)))]

    def test_distinct_tokens(self) -> None:
        """Should find nothing in a document without repeats."""
        assert find_recurring_spans(list(range(10, 30)), min_len=2) == []

    def test_repeated_token_is_split_left_to_right(self) -> None:
        """Should resolve overlapping occurrences greedily from the left."""
        clusters = find_recurring_spans([7] * 5, min_len=2)

        assert clusters == [SpanCluster((7, 7), ((0, 1), (2, 3)))]

    def test_budget_limits_clusters(self) -> None:
        """Should stop after `budget` clusters."""
        doc = [1, 2, 9, 1, 2, 8, 3, 4, 6, 3, 4]

        assert len(find_recurring_spans(doc, budget=1)) == 1
        assert len(find_recurring_spans(doc)) == 2

    def test_excluded_tokens_break_spans(self) -> None:
        """Should never include an excluded token in a span."""
        doc = [5, 0, 6, 5, 0, 6]

        assert find_recurring_spans(doc, exclude=[0]) == []

    def test_min_len_must_be_two(self) -> None:
        """Should reject single-token spans."""
        with pytest.raises(InputError):
            find_recurring_spans([1, 1], min_len=1)

    def test_matches_brute_force(self, rng: np.random.Generator) -> None:
        """Should agree with the all-pairs reference on random short documents."""
        for _ in range(40):
            doc = [int(t) for t in rng.integers(0, 4, size=int(rng.integers(2, 40)))]
            budget = int(rng.integers(1, 6))

            expected = brute_force_recurring_spans(doc, 2, budget, exclude=(0,))

            assert find_recurring_spans(doc, 2, budget, exclude=(0,)) == expected


class TestMakeRssExample:
    """Tests for RSS example construction."""

    def test_single_cluster(self, rng: np.random.Generator) -> None:
        """Should leave one sentinel whose golden span is the other occurrence."""
        doc = [10, 11, 12, 20, 10, 11, 12, 21]
        cluster = SpanCluster((10, 11, 12), ((0, 2), (4, 6)))

        example = make_rss_example(doc, [cluster], rng)

        assert int((example.tokens == QUESTION_ID).sum()) == 1
        assert len(example) == 6
        [(start, end)] = example.answers
        assert example.tokens[start : end + 1].tolist() == [10, 11, 12]
        assert not example.answer_mask[example.questions[0]]

    def test_zero_clusters(self, rng: np.random.Generator) -> None:
        """Should keep the document unchanged."""
        doc = [4, 5, 6, 7]

        example = make_rss_example(doc, [], rng)

        assert example.tokens.tolist() == doc
        assert example.questions == []

    def test_sentinel_count(self, rng: np.random.Generator) -> None:
        """Should emit occurrences minus one sentinels per cluster."""
        doc = [10, 11, 20, 10, 11, 21, 10, 11, 12, 13, 22, 12, 13]
        clusters = find_recurring_spans(doc)

        example = make_rss_example(doc, clusters, rng)

        expected = sum(len(c.occurrences) - 1 for c in clusters)
        assert len(example.questions) == expected == 3
        assert int((example.tokens == QUESTION_ID).sum()) == expected

    def test_protected_tokens_are_not_answers(self, rng: np.random.Generator) -> None:
        """Should exclude protected ids from the answer mask."""
        example = make_rss_example([1, 7, 8, 9], [], rng, protected=[1, 9])

        assert example.answer_mask.tolist() == [False, True, True, False]
