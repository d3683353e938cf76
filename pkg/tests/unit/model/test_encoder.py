"""Unit tests for the LittleBird and dense encoders."""

import numpy as np
import pytest

from littlebird.attention import ScoreAudit, complexity_audit
from littlebird.config import ModelConfig
from littlebird.exceptions import ConfigurationError, InputError
from littlebird.model import BaseEncoder, DenseEncoder, EncoderModel, init_student_from_teacher
from littlebird.numkit import ParamStore, Tensor, grad_check, ops
from littlebird.posbias import PositionIds


def _pair(config: ModelConfig, seed: int = 3) -> tuple[EncoderModel, DenseEncoder]:
    teacher = DenseEncoder(config, seed=seed)
    student = EncoderModel(config, seed=seed + 1)
    init_student_from_teacher(student, teacher)
    return student, teacher


class TestEncoderModel:
    """Tests for the LittleBird encoder."""

    def test_base_encoder_is_abstract(self, tiny_config: ModelConfig) -> None:
        """Should refuse to build an encoder without an encode method."""
        with pytest.raises(TypeError, match="encode"):
            BaseEncoder(tiny_config)  # type: ignore[abstract]

    def test_zero_layers_return_embeddings(self, rng: np.random.Generator) -> None:
        """Should output the scaled embeddings when N=0."""
        config = ModelConfig(vocab_size=16, d_model=4, heads=2, layers=0, block_size=4, pack_size=2)
        model = EncoderModel(config, seed=1)
        tokens = rng.integers(0, 16, size=6)

        result = model.encode(tokens)

        np.testing.assert_array_equal(result.hidden.data, model.embed(tokens).data)

    def test_deterministic(self, small_config: ModelConfig, rng: np.random.Generator) -> None:
        """Should give bit-identical outputs for the same input."""
        model = EncoderModel(small_config, seed=5)
        tokens = rng.integers(1, small_config.vocab_size, size=20)

        first = model.encode(tokens).hidden.data
        second = model.encode(tokens).hidden.data

        np.testing.assert_array_equal(first, second)

    def test_same_seed_same_parameters(self, small_config: ModelConfig) -> None:
        """Should build identical parameters from the same seed."""
        first = EncoderModel(small_config, seed=9).store.arrays()
        second = EncoderModel(small_config, seed=9).store.arrays()

        assert list(first) == list(second)
        for name in first:
            np.testing.assert_array_equal(first[name], second[name])

    def test_unknown_token(self, small_config: ModelConfig) -> None:
        """Should reject token ids outside the vocabulary."""
        model = EncoderModel(small_config)

        with pytest.raises(InputError):
            model.encode([1, 2, small_config.vocab_size])

    def test_output_keeps_input_length(self, small_config: ModelConfig, rng: np.random.Generator) -> None:
        """Should drop block padding from the hidden states."""
        model = EncoderModel(small_config, seed=2)

        result = model.encode(rng.integers(1, 32, size=13), collect=True)

        assert result.hidden.shape == (13, small_config.d_model)
        assert result.padded_length == 16
        assert result.layers[0].pack is not None
        assert result.layers[0].pack.shape == (small_config.pack_size, small_config.d_model)

    def test_blocked_matches_dense_path(self, small_config: ModelConfig, rng: np.random.Generator) -> None:
        """Should agree between the blocked and dense USW paths."""
        model = EncoderModel(small_config, seed=4)
        tokens = rng.integers(1, 32, size=29)

        blocked = model.encode(tokens, impl="blocked").hidden.data
        dense = model.encode(tokens, impl="dense").hidden.data

        assert np.abs(blocked - dense).max() < 1e-8

    @pytest.mark.parametrize("impl", ["blocked", "dense"])
    def test_translation_invariant(
        self, impl: str, small_config: ModelConfig, rng: np.random.Generator
    ) -> None:
        """Should give the same outputs when every id moves by a constant and id 0 is absent."""
        model = EncoderModel(small_config, seed=4)
        tokens = rng.integers(1, small_config.vocab_size, size=20)
        pos = PositionIds.arange(20, start=1)

        base = model.encode(tokens, pos, impl=impl).hidden.data  # type: ignore[arg-type]
        moved = model.encode(tokens, pos.shifted(9), impl=impl).hidden.data  # type: ignore[arg-type]

        np.testing.assert_allclose(moved, base, atol=1e-10)

    def test_audit_within_bound(self, small_config: ModelConfig, rng: np.random.Generator) -> None:
        """Should stay within the per-layer score bound."""
        model = EncoderModel(small_config, seed=4)
        audit = ScoreAudit()

        model.encode(rng.integers(1, 32, size=32), audit=audit)

        assert audit.count <= small_config.layers * complexity_audit(model.spec, 32)

    def test_gradients_reach_pack_and_slopes(self, tiny_config: ModelConfig, rng: np.random.Generator) -> None:
        """Should pass a gradient check including P0 and the slopes."""
        model = EncoderModel(tiny_config, seed=11)
        tokens = rng.integers(1, tiny_config.vocab_size, size=12)
        pos = PositionIds(np.array([0, 1, 2, 3, 6, 7, 8, 9, 10, 13, 14, 15]))
        probe = rng.normal(size=(12, tiny_config.d_model))
        store = ParamStore()
        for name in ("pack.initial", "embedding", "layers.0.slopes.alpha", "layers.1.slopes.gamma"):
            store.register(name, model.store[name])

        def loss() -> Tensor:
            return ops.sum(model.encode(tokens, pos).hidden * probe)

        assert grad_check(loss, store, max_entries=6, rng=rng) < 1e-4

    def test_pack_init_scale(self, tiny_config: ModelConfig) -> None:
        """Should draw P0 with pack_init_std, independent of init_std."""
        wide = EncoderModel(tiny_config.model_copy(update={"pack_init_std": 3.0}), seed=2)
        narrow = EncoderModel(tiny_config.model_copy(update={"pack_init_std": 0.01}), seed=2)

        ratio = wide.store["pack.initial"].data / narrow.store["pack.initial"].data

        np.testing.assert_allclose(ratio, 300.0)
        np.testing.assert_array_equal(wide.store["embedding"].data, narrow.store["embedding"].data)


class TestDenseEncoder:
    """Tests for the dense baseline and the warm start."""

    def test_single_block_equivalence(self) -> None:
        """Should match the dense baseline when l <= b and s = 0."""
        config = ModelConfig(
            vocab_size=20, d_model=8, heads=2, layers=2, block_size=16, pack_size=0, init_std=0.2
        )
        student, teacher = _pair(config)
        tokens = np.array([1, 5, 7, 3, 9, 2, 11, 4, 8, 6])

        lb = student.encode(tokens).hidden.data
        dense = teacher.encode(tokens).hidden.data

        assert np.abs(lb - dense).max() < 1e-8

    def test_single_token(self) -> None:
        """Should agree on a one-token input."""
        config = ModelConfig(vocab_size=12, d_model=4, heads=1, layers=1, block_size=4, pack_size=0)
        student, teacher = _pair(config)

        np.testing.assert_allclose(
            student.encode([3]).hidden.data, teacher.encode([3]).hidden.data, atol=1e-12
        )

    def test_translation_invariant(self, small_config: ModelConfig, rng: np.random.Generator) -> None:
        """Should ignore a constant shift of ids that never reach 0."""
        teacher = DenseEncoder(small_config, seed=2)
        tokens = rng.integers(1, small_config.vocab_size, size=12)
        pos = PositionIds(np.array([1, 2, 3, 5, 6, 9, 10, 11, 15, 16, 17, 18]))

        np.testing.assert_allclose(
            teacher.encode(tokens, pos.shifted(40)).hidden.data,
            teacher.encode(tokens, pos).hidden.data,
            atol=1e-10,
        )

    def test_dense_audit_is_quadratic(self, small_config: ModelConfig, rng: np.random.Generator) -> None:
        """Should compute l squared scores per layer."""
        teacher = DenseEncoder(small_config)
        audit = ScoreAudit()

        teacher.encode(rng.integers(1, 32, size=24), audit=audit)

        assert audit.count == small_config.layers * 24 * 24

    def test_mismatched_layers(self, small_config: ModelConfig) -> None:
        """Should refuse to warm-start across different depths."""
        student = EncoderModel(small_config.model_copy(update={"layers": 1}))

        with pytest.raises(ConfigurationError):
            init_student_from_teacher(student, DenseEncoder(small_config))

    def test_warm_start_copies_projections(self, small_config: ModelConfig) -> None:
        """Should copy the teacher attention into pack and unpack projections."""
        student, teacher = _pair(small_config)

        for mine, theirs in zip(student.layers, teacher.layers, strict=True):
            assert mine.pack is not None
            np.testing.assert_array_equal(
                mine.pack.query.weight.data, theirs.attention.query.weight.data
            )
            np.testing.assert_array_equal(
                mine.unpack.value.weight.data, theirs.attention.value.weight.data
            )
        np.testing.assert_array_equal(student.embedding.data, teacher.embedding.data)
