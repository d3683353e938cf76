"""Unit tests for ALiBi, BiALiBi and pack distances."""

import numpy as np
import pytest

from littlebird.exceptions import InputError, NumericError
from littlebird.numkit import ParamStore, Tensor, grad_check, ops
from littlebird.posbias import (
    BiasSlopes,
    PositionIds,
    alibi_distance,
    alibi_slopes,
    bialibi_distance,
    pack_distance,
)


class TestAlibiDistance:
    """Tests for the causal ALiBi distance."""

    def test_single_token(self) -> None:
        """Should be [[0]] for one token."""
        assert alibi_distance(1, 0.5).data.tolist() == [[0.0]]

    def test_three_tokens(self) -> None:
        """Should grow linearly below the diagonal and be infinite above."""
        inf = float("inf")

        result = alibi_distance(3, 1.0).data.tolist()

        assert result == [[0.0, inf, inf], [1.0, 0.0, inf], [2.0, 1.0, 0.0]]


class TestBialibiDistance:
    """Tests for the bidirectional distance matrix."""

    def test_direct_formula(self) -> None:
        """Should apply alpha for [CLS] pairs and beta/gamma left/right."""
        slopes = BiasSlopes.fixed(1, alpha=0.5, beta=1.0, gamma=2.0)

        result = bialibi_distance(PositionIds.arange(3), slopes).data[0]

        assert result.tolist() == [[0.0, 0.5, 0.5], [0.5, 0.0, 2.0], [0.5, 1.0, 0.0]]

    def test_zero_slopes(self) -> None:
        """Should give a zero matrix for zero slopes."""
        slopes = BiasSlopes.fixed(2)

        result = bialibi_distance(PositionIds.arange(5), slopes)

        assert result.shape == (2, 5, 5)
        assert not result.data.any()

    def test_uses_ids_not_indices(self) -> None:
        """Should measure distances between position ids."""
        slopes = BiasSlopes.fixed(1, beta=1.0, gamma=1.0)

        result = bialibi_distance(PositionIds(np.array([0, 1, 4])), slopes).data[0]

        assert result[2, 1] == 3.0
        assert result[1, 2] == 3.0

    def test_per_head_slopes(self) -> None:
        """Should scale each head by its own slopes."""
        slopes = BiasSlopes.fixed(2, beta=[1.0, 3.0], gamma=[1.0, 3.0])

        result = bialibi_distance(PositionIds.arange(3), slopes).data

        assert result[0, 2, 1] == 1.0
        assert result[1, 2, 1] == 3.0

    def test_slope_gradients(self, rng: np.random.Generator) -> None:
        """Should be differentiable in alpha, beta and gamma."""
        store = ParamStore()
        slopes = BiasSlopes.create(store, "slopes", 2)
        weights = rng.normal(size=(2, 4, 4))
        pos = PositionIds(np.array([0, 1, 3, 6]))

        error = grad_check(lambda: ops.sum(bialibi_distance(pos, slopes) * weights), store)

        assert error < 1e-6

    def test_translation_invariant(self) -> None:
        """Should not change when every id moves by the same offset and id 0 is absent."""
        slopes = BiasSlopes.fixed(2, alpha=[0.3, -0.2], beta=[0.5, 1.5], gamma=[0.25, 2.0])
        pos = PositionIds(np.array([1, 2, 5, 6, 11]))
        base = bialibi_distance(pos, slopes).data

        for offset in (1, 7, 100):
            np.testing.assert_array_equal(bialibi_distance(pos.shifted(offset), slopes).data, base)

    def test_swapping_left_and_right_slopes_transposes(self) -> None:
        """Should give the transposed matrix when beta and gamma trade places."""
        pos = PositionIds(np.array([0, 1, 3, 4, 9]))

        forward = bialibi_distance(pos, BiasSlopes.fixed(1, alpha=0.4, beta=0.5, gamma=1.75))
        swapped = bialibi_distance(pos, BiasSlopes.fixed(1, alpha=0.4, beta=1.75, gamma=0.5))

        np.testing.assert_array_equal(swapped.data[0], forward.data[0].T)

    def test_equal_slopes_reduce_to_alibi(self) -> None:
        """Should be symmetric and match causal ALiBi below the diagonal with alpha = 0."""
        slopes = BiasSlopes.fixed(1, beta=0.25, gamma=0.25)
        lower = np.tril(np.ones((6, 6), dtype=bool))

        result = bialibi_distance(PositionIds.arange(6, start=1), slopes).data[0]

        np.testing.assert_array_equal(result[lower], alibi_distance(6, 0.25).data[lower])
        np.testing.assert_array_equal(result, result.T)

    def test_rejects_raw_arrays(self) -> None:
        """Should require PositionIds."""
        with pytest.raises(InputError):
            bialibi_distance(np.arange(3), BiasSlopes.fixed(1))  # type: ignore[arg-type]


class TestPackDistance:
    """Tests for the pack distance."""

    def test_constant_entries(self) -> None:
        """Should fill every entry with ((beta + gamma) / 2) * b."""
        slopes = BiasSlopes.fixed(1, beta=1.0, gamma=2.0)

        result = pack_distance(2, 3, slopes, block_size=64)

        assert result.shape == (1, 2, 3)
        assert np.all(result.data == 96.0)

    def test_empty_pack(self) -> None:
        """Should return an empty matrix for s=0."""
        result = pack_distance(0, 3, BiasSlopes.fixed(2, beta=1.0), block_size=4)

        assert result.shape == (2, 0, 3)

    def test_zero_slopes(self) -> None:
        """Should be zero when beta and gamma are zero."""
        result = pack_distance(2, 3, BiasSlopes.fixed(1, alpha=5.0), block_size=8)

        assert not result.data.any()


class TestBiasSlopes:
    """Tests for slope initialization."""

    def test_geometric_sequence(self) -> None:
        """Should produce 2^(-8k/H)."""
        np.testing.assert_allclose(alibi_slopes(4), [2**-2, 2**-4, 2**-6, 2**-8])

    def test_create_initializes_like_alibi(self) -> None:
        """Should start with alpha 0 and beta = gamma = ALiBi slopes."""
        store = ParamStore()
        slopes = BiasSlopes.create(store, "layer0.slopes", 2)

        assert slopes.alpha.data.tolist() == [0.0, 0.0]
        np.testing.assert_allclose(slopes.beta.data, alibi_slopes(2))
        np.testing.assert_allclose(slopes.gamma.data, alibi_slopes(2))
        assert "layer0.slopes.beta" in store

    def test_non_finite_slopes(self) -> None:
        """Should reject infinite slopes."""
        with pytest.raises(NumericError):
            BiasSlopes(Tensor([float("inf")]), Tensor([0.0]), Tensor([0.0]))
