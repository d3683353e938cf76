"""Unit tests for the task heads."""

import numpy as np
import pytest

from littlebird.exceptions import InputError
from littlebird.model import ClassifierHead, SpanHead
from littlebird.numkit import ParamStore, Tensor


class TestSpanHead:
    """Tests for the conditional span pointer."""

    def test_single_valid_token(self, rng: np.random.Generator) -> None:
        """Should put all start and end mass on the only valid position."""
        head = SpanHead(ParamStore(), "span", 4, rng, init_std=0.5)
        hidden = Tensor(rng.normal(size=(5, 4)))
        valid = [False, False, True, False, False]

        prediction = head(hidden, [0], valid)

        np.testing.assert_allclose(prediction.start_probs()[0], [0, 0, 1, 0, 0])
        np.testing.assert_allclose(prediction.end_probs()[0], [0, 0, 1, 0, 0])
        assert prediction.best_spans() == [(2, 2)]

    def test_argmax_start_at_constructed_position(self, rng: np.random.Generator) -> None:
        """Should pick the position whose vector maximizes the start scorer."""
        head = SpanHead(ParamStore(), "span", 3, rng)
        head.start.weight.data[...] = np.eye(3)
        hidden = np.full((6, 3), 0.01)
        hidden[0] = [1.0, 0.0, 0.0]
        hidden[4] = [5.0, 0.0, 0.0]

        prediction = head(Tensor(hidden), [0], np.ones(6, dtype=bool))

        assert int(prediction.starts[0]) == 4
        assert prediction.best_spans()[0][1] >= 4

    def test_teacher_forced_start(self, rng: np.random.Generator) -> None:
        """Should condition the end on the given start."""
        head = SpanHead(ParamStore(), "span", 4, rng)

        prediction = head(Tensor(rng.normal(size=(6, 4))), [0, 1], np.ones(6, dtype=bool), starts=[3, 2])

        assert prediction.starts.tolist() == [3, 2]
        assert not prediction.end_mask[0, :3].any()
        assert prediction.end_mask[0, 3:].all()

    def test_requires_question(self, rng: np.random.Generator) -> None:
        """Should reject an empty question list."""
        head = SpanHead(ParamStore(), "span", 4, rng)

        with pytest.raises(InputError):
            head(Tensor(np.zeros((3, 4))), [], np.ones(3, dtype=bool))

    def test_requires_valid_position(self, rng: np.random.Generator) -> None:
        """Should reject a mask with no valid answer position."""
        head = SpanHead(ParamStore(), "span", 4, rng)

        with pytest.raises(InputError):
            head(Tensor(np.zeros((3, 4))), [0], np.zeros(3, dtype=bool))


class TestClassifierHead:
    """Tests for the classifier head."""

    def test_reads_one_row(self, rng: np.random.Generator) -> None:
        """Should return (1, k) logits from the requested row."""
        head = ClassifierHead(ParamStore(), "cls", 4, 3, rng)

        logits = head(Tensor(rng.normal(size=(5, 4))), index=2)

        assert logits.shape == (1, 3)

    def test_index_out_of_range(self, rng: np.random.Generator) -> None:
        """Should reject an index past the sequence."""
        head = ClassifierHead(ParamStore(), "cls", 4, 3, rng)

        with pytest.raises(InputError):
            head(Tensor(np.zeros((2, 4))), index=2)
