"""Unit tests for training objectives, optimizers and the metric log."""

import math
from pathlib import Path

import numpy as np
import pytest

from littlebird.config import ModelConfig, TrainConfig
from littlebird.exceptions import ConfigurationError
from littlebird.model import EncoderModel
from littlebird.numkit import ParamStore, Tensor, ops
from littlebird.posbias import PositionIds, apply_gaps
from littlebird.protocols import OptimizerProtocol
from littlebird.train import (
    AdamW,
    MetricRecord,
    MetricsLog,
    MomentumSGD,
    RssExample,
    build_optimizer,
    classification_loss,
    exact_match,
    mask_tokens,
    masked_token_loss,
    rss_loss,
    span_prediction,
)
from littlebird.train.vocab import CLS_ID, MASK_ID, QUESTION_ID


def _example() -> RssExample:
    tokens = np.array([CLS_ID, 8, 9, 10, 11, QUESTION_ID, 12, 13], dtype=np.int64)
    mask = ~np.isin(tokens, [CLS_ID, QUESTION_ID])
    return RssExample(tokens, [5], [(2, 3)], mask)


class TestRssObjective:
    """Tests for the span selection loss."""

    def test_loss_is_positive_and_finite(self, tiny_config: ModelConfig) -> None:
        """Should score start and end against the golden span."""
        model = EncoderModel(tiny_config, seed=1)
        example = _example()

        loss = rss_loss(span_prediction(model, example), example)

        assert math.isfinite(loss.item())
        assert loss.item() > 0.0

    def test_loss_gradient_reaches_span_head(self, tiny_config: ModelConfig) -> None:
        """Should backpropagate into the span head and the encoder."""
        model = EncoderModel(tiny_config, seed=1)
        example = _example()

        rss_loss(span_prediction(model, example), example).backward()

        assert model.store["heads.span.start.weight"].grad is not None
        assert model.store["embedding"].grad is not None

    def test_exact_match_range(self, tiny_config: ModelConfig) -> None:
        """Should return a fraction of questions."""
        model = EncoderModel(tiny_config, seed=1)

        assert 0.0 <= exact_match(model, [_example(), _example()]) <= 1.0
        assert exact_match(model, []) == 0.0


class TestMaskedTokens:
    """Tests for masked-token corruption."""

    def test_protected_tokens_never_selected(self, rng: np.random.Generator) -> None:
        """Should leave protected ids untouched."""
        tokens = np.array([CLS_ID] + list(range(6, 30)))

        masked = mask_tokens(tokens, rng, 0.5, 40, protected=range(6))

        assert 0 not in masked.positions
        assert masked.tokens[0] == CLS_ID
        np.testing.assert_array_equal(masked.targets, tokens[masked.positions])

    def test_at_least_one_selection(self, rng: np.random.Generator) -> None:
        """Should select one token even at a zero rate."""
        masked = mask_tokens(np.arange(6, 16), rng, 0.0, 20, protected=range(6))

        assert masked.positions.size == 1

    def test_mostly_mask_token(self, rng: np.random.Generator) -> None:
        """Should replace most selected tokens with [MASK]."""
        masked = mask_tokens(np.full(2000, 9), rng, 0.5, 20, protected=range(6))

        share = float(np.mean(masked.tokens[masked.positions] == MASK_ID))
        assert 0.7 < share < 0.9

    def test_invalid_rate(self, rng: np.random.Generator) -> None:
        """Should reject rates outside [0, 1)."""
        with pytest.raises(ConfigurationError):
            mask_tokens([6, 7], rng, 1.0, 10)

    def test_masked_token_loss(self, tiny_config: ModelConfig, rng: np.random.Generator) -> None:
        """Should be near log(vocab) for a fresh model."""
        model = EncoderModel(tiny_config, seed=2)
        masked = mask_tokens(np.arange(6, 18), rng, 0.3, tiny_config.vocab_size, range(6))

        loss = masked_token_loss(model, masked).item()

        assert abs(loss - math.log(tiny_config.vocab_size)) < 1.0

    def test_masked_token_loss_reads_position_ids(
        self, tiny_config: ModelConfig, rng: np.random.Generator
    ) -> None:
        """Should encode the corrupted tokens at the given position ids."""
        model = EncoderModel(tiny_config, seed=2)
        masked = mask_tokens(np.arange(6, 18), rng, 0.3, tiny_config.vocab_size, range(6))
        pos = apply_gaps(PositionIds.arange(12), {3: 5})
        hidden = model.encode(masked.tokens, pos).hidden
        logits = model.token_head(ops.take(hidden, masked.positions, axis=0))
        expected = ops.cross_entropy(logits, masked.targets).item()

        assert masked_token_loss(model, masked, pos).item() == pytest.approx(expected)
        assert masked_token_loss(model, masked).item() != pytest.approx(expected)

    def test_classification_needs_head(self, tiny_config: ModelConfig) -> None:
        """Should raise ConfigurationError without a classifier head."""
        model = EncoderModel(tiny_config)

        with pytest.raises(ConfigurationError):
            classification_loss(model, [1, 2, 3], label=0, index=2)


class TestOptimizers:
    """Tests for AdamW and momentum SGD."""

    def _quadratic(self) -> tuple[ParamStore, Tensor]:
        store = ParamStore()
        w = store.register("w", Tensor(np.array([[3.0, -2.0]])))
        return store, w

    @pytest.mark.parametrize("name", ["adamw", "momentum"])
    def test_descends_quadratic(self, name: str) -> None:
        """Should reduce a convex quadratic."""
        store, w = self._quadratic()
        optimizer = build_optimizer(
            store, TrainConfig(optimizer=name, learning_rate=0.05, weight_decay=0.0)
        )
        start = float(np.sum(w.data**2))

        for _ in range(20):
            optimizer.zero_grad()
            ops.sum(w * w).backward()
            optimizer.step()

        assert float(np.sum(w.data**2)) < start
        assert isinstance(optimizer, OptimizerProtocol)

    def test_adamw_first_step_size(self) -> None:
        """Should move each entry by the learning rate on the first step."""
        store, w = self._quadratic()
        optimizer = AdamW(store, learning_rate=0.1, weight_decay=0.0)

        ops.sum(w * w).backward()
        optimizer.step()

        np.testing.assert_allclose(w.data, [[2.9, -1.9]], atol=1e-6)

    def test_weight_decay_skips_vectors(self) -> None:
        """Should decay matrices but not bias vectors."""
        store = ParamStore()
        matrix = store.register("m", Tensor(np.ones((2, 2))))
        vector = store.register("v", Tensor(np.ones(2)))
        matrix.grad = np.zeros((2, 2))
        vector.grad = np.zeros(2)

        MomentumSGD(store, learning_rate=0.1, weight_decay=0.5).step()

        np.testing.assert_allclose(matrix.data, 0.95)
        np.testing.assert_allclose(vector.data, 1.0)


class TestMetricsLog:
    """Tests for the CSV metric log."""

    def test_header_written_once(self, tmp_path: Path) -> None:
        """Should write the header only for a new file."""
        path = tmp_path / "run" / "metrics.csv"
        log = MetricsLog(path)

        log.append(MetricRecord("teacher", 1, 4, 1.5, 0.25, 7))
        log.append(MetricRecord("long", 1, 8, 0.5, 0.75, 7))

        assert path.read_text(encoding="utf-8").splitlines() == [
            "stage,epoch,step,loss,acc,seed",
            "teacher,1,4,1.500000,0.2500,7",
            "long,1,8,0.500000,0.7500,7",
        ]

    def test_appends_to_existing_file(self, tmp_path: Path) -> None:
        """Should keep earlier rows when reopened."""
        path = tmp_path / "metrics.csv"
        MetricsLog(path).append(MetricRecord("init", 0, 0, 1.0, 0.0, 1))

        MetricsLog(path).append(MetricRecord("distill", 1, 2, 0.9, 0.1, 1))

        assert len(path.read_text(encoding="utf-8").splitlines()) == 3

    def test_in_memory_log(self) -> None:
        """Should filter records by stage."""
        log = MetricsLog()
        log.append(MetricRecord("a", 1, 1, 1.0, 0.0, 0))
        log.append(MetricRecord("b", 1, 1, 1.0, 0.0, 0))

        assert [r.stage for r in log.for_stage("b")] == ["b"]
