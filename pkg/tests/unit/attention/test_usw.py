"""Unit tests for unpack & sliding-window attention."""

import numpy as np
import pytest

from littlebird.attention import (
    AttentionSpec,
    AttentionWeights,
    ScoreAudit,
    allowed_key_counts,
    block_layout,
    build_sparsity_mask,
    complexity_audit,
    full_attention,
    scatter_blocked_probs,
    usw_attention_blocked,
    usw_attention_dense,
)
from littlebird.exceptions import DimensionError
from littlebird.numkit import ParamStore, Tensor, grad_check, ops
from littlebird.posbias import BiasSlopes, PositionIds, bialibi_distance


def _setup(
    spec: AttentionSpec, length: int, rng: np.random.Generator
) -> tuple[ParamStore, Tensor, Tensor | None, BiasSlopes, AttentionWeights]:
    store = ParamStore()
    weights = AttentionWeights(store, "attn", spec.model_dim, rng, init_std=0.4)
    slopes = BiasSlopes.create(store, "slopes", spec.heads)
    slopes.alpha.data[...] = rng.normal(size=spec.heads) * 0.5
    x = store.register("x", Tensor(rng.normal(size=(length, spec.model_dim))))
    packed = None
    if spec.pack_size:
        packed = store.register("packed", Tensor(rng.normal(size=(spec.pack_size, spec.model_dim))))
    return store, x, packed, slopes, weights


class TestSparsityMask:
    """Tests for the window-plus-global mask."""

    def test_block_layout_edges(self) -> None:
        """Should mask off-sequence neighbors and duplicate global slots."""
        index, valid = block_layout(4)

        assert index.tolist() == [[0, 0, 0, 1], [0, 0, 1, 2], [0, 1, 2, 3], [0, 2, 3, 3]]
        assert valid.tolist() == [
            [False, False, True, True],
            [False, True, True, True],
            [True, True, True, True],
            [True, True, True, False],
        ]

    def test_empty_pack_mask_is_window_mask(self) -> None:
        """Should reduce to the window-plus-global mask when s = 0."""
        bare = build_sparsity_mask(AttentionSpec(heads=1, head_dim=1, block_size=4, pack_size=0), 16)
        packed = build_sparsity_mask(AttentionSpec(heads=1, head_dim=1, block_size=4, pack_size=3), 16)

        np.testing.assert_array_equal(bare.joint(), packed.allowed)
        np.testing.assert_array_equal(packed.joint()[:, 3:], bare.allowed)
        assert packed.joint()[:, :3].all()

    def test_allowed_counts(self) -> None:
        """Should count window, global and pack keys per query."""
        spec = AttentionSpec(heads=1, head_dim=1, block_size=2, pack_size=3)

        counts = allowed_key_counts(build_sparsity_mask(spec, 8))

        assert counts.tolist() == [7, 7, 9, 9, 11, 11, 9, 9]


class TestUswDense:
    """Tests for the reference USW attention."""

    def test_single_block_matches_full_attention(self, rng: np.random.Generator) -> None:
        """Should equal biased full attention when one block covers everything."""
        spec = AttentionSpec(heads=2, head_dim=3, block_size=8, pack_size=0)
        _, x, _, slopes, weights = _setup(spec, 8, rng)
        pos = PositionIds.arange(8)

        usw = usw_attention_dense(x, None, pos, slopes, spec, weights)
        full = full_attention(x, x, weights, spec.heads, bias=bialibi_distance(pos, slopes))

        np.testing.assert_allclose(usw.output.data, full.output.data, atol=1e-12)

    def test_zero_slopes_single_block_is_unbiased(self, rng: np.random.Generator) -> None:
        """Should equal plain self-attention with zero slopes."""
        spec = AttentionSpec(heads=1, head_dim=4, block_size=6, pack_size=0)
        _, x, _, _, weights = _setup(spec, 6, rng)

        usw = usw_attention_dense(
            x, None, PositionIds.arange(6), BiasSlopes.fixed(1), spec, weights
        )
        full = full_attention(x, x, weights, 1)

        np.testing.assert_allclose(usw.output.data, full.output.data, atol=1e-12)

    def test_joint_normalization(self, small_spec: AttentionSpec, rng: np.random.Generator) -> None:
        """Should normalize pack and window keys together."""
        _, x, packed, slopes, weights = _setup(small_spec, 16, rng)

        probs = usw_attention_dense(
            x, packed, PositionIds.arange(16), slopes, small_spec, weights
        ).probs.data

        np.testing.assert_allclose(probs.sum(axis=-1), 1.0, atol=1e-12)
        mask = build_sparsity_mask(small_spec, 16).joint()
        assert np.all(probs[:, ~mask] == 0.0)

    def test_missing_pack(self, small_spec: AttentionSpec, rng: np.random.Generator) -> None:
        """Should reject a missing packed context when s > 0."""
        _, x, _, slopes, weights = _setup(small_spec, 8, rng)

        with pytest.raises(DimensionError):
            usw_attention_dense(x, None, PositionIds.arange(8), slopes, small_spec, weights)


class TestUswBlocked:
    """Tests for the block-batched USW attention."""

    @pytest.mark.parametrize(
        "length,block,pack,heads",
        [
            (16, 4, 0, 1),
            (16, 4, 2, 2),
            (24, 8, 4, 2),
            (32, 4, 3, 1),
            (8, 8, 2, 2),
            (4, 4, 0, 2),
        ],
    )
    def test_matches_dense(
        self, length: int, block: int, pack: int, heads: int, rng: np.random.Generator
    ) -> None:
        """Should agree with the dense reference within 1e-8."""
        spec = AttentionSpec(heads=heads, head_dim=3, block_size=block, pack_size=pack)
        _, x, packed, slopes, weights = _setup(spec, length, rng)
        pos = PositionIds(np.cumsum(rng.integers(1, 4, size=length)) - 1)
        pos = PositionIds(pos.ids - pos.ids[0])

        dense = usw_attention_dense(x, packed, pos, slopes, spec, weights)
        blocked = usw_attention_blocked(x, packed, pos, slopes, spec, weights)

        assert np.abs(dense.output.data - blocked.output.data).max() < 1e-8
        scattered = scatter_blocked_probs(blocked.probs.data, spec)
        assert np.abs(scattered - dense.probs.data).max() < 1e-8

    def test_padding_tail_is_masked(self, small_spec: AttentionSpec, rng: np.random.Generator) -> None:
        """Should agree with dense when trailing tokens are not real."""
        _, x, packed, slopes, weights = _setup(small_spec, 12, rng)
        pos = PositionIds.arange(9).padded_to(12)

        dense = usw_attention_dense(x, packed, pos, slopes, small_spec, weights)
        blocked = usw_attention_blocked(x, packed, pos, slopes, small_spec, weights)

        assert np.abs(dense.output.data - blocked.output.data).max() < 1e-8
        assert np.all(dense.probs.data[..., small_spec.pack_size + 9 :] == 0.0)

    def test_first_block_has_no_left_neighbor(self, rng: np.random.Generator) -> None:
        """Should give zero mass to the missing left slot of block 0."""
        spec = AttentionSpec(heads=2, head_dim=2, block_size=32, pack_size=16)
        _, x, packed, slopes, weights = _setup(spec, 256, rng)

        probs = usw_attention_blocked(
            x, packed, PositionIds.arange(256), slopes, spec, weights
        ).probs.data

        s, b = spec.pack_size, spec.block_size
        assert np.all(probs[:, 0, :, s : s + 2 * b] == 0.0)
        np.testing.assert_allclose(probs.sum(axis=-1), 1.0, atol=1e-12)

    def test_locality(self, rng: np.random.Generator) -> None:
        """Should leave block 0 outputs unchanged when a distant token changes."""
        spec = AttentionSpec(heads=2, head_dim=2, block_size=4, pack_size=2)
        _, x, packed, slopes, weights = _setup(spec, 32, rng)
        pos = PositionIds.arange(32)
        before = usw_attention_blocked(x, packed, pos, slopes, spec, weights).output.data

        perturbed = x.data.copy()
        perturbed[20] += 5.0
        after = usw_attention_blocked(
            Tensor(perturbed), packed, pos, slopes, spec, weights
        ).output.data

        np.testing.assert_array_equal(after[:4], before[:4])
        assert not np.array_equal(after[16:24], before[16:24])

    def test_audit_within_bound(self, small_spec: AttentionSpec, rng: np.random.Generator) -> None:
        """Should count l(4b+s) scores for the unpack step."""
        _, x, packed, slopes, weights = _setup(small_spec, 16, rng)
        audit = ScoreAudit()

        usw_attention_blocked(x, packed, PositionIds.arange(16), slopes, small_spec, weights, audit)

        assert audit.count == 16 * (4 * 4 + 2)
        assert audit.count <= complexity_audit(small_spec, 16)

    def test_length_must_be_block_multiple(
        self, small_spec: AttentionSpec, rng: np.random.Generator
    ) -> None:
        """Should raise DimensionError for a ragged length."""
        _, x, packed, slopes, weights = _setup(small_spec, 10, rng)

        with pytest.raises(DimensionError):
            usw_attention_blocked(x, packed, PositionIds.arange(10), slopes, small_spec, weights)

    @pytest.mark.parametrize("impl", [usw_attention_dense, usw_attention_blocked])
    def test_gradients(self, impl, small_spec: AttentionSpec, rng: np.random.Generator) -> None:
        """Should pass a gradient check on X, P, projections and slopes."""
        store, x, packed, slopes, weights = _setup(small_spec, 12, rng)
        pos = PositionIds(np.array([0, 1, 2, 4, 5, 6, 9, 10, 11, 12, 15, 16]))
        probe = rng.normal(size=(12, small_spec.model_dim))

        def loss() -> Tensor:
            out = impl(x, packed, pos, slopes, small_spec, weights).output
            return ops.sum(out * probe)

        assert grad_check(loss, store) < 1e-4


class TestComplexityAudit:
    """Tests for the closed-form score bound."""

    def test_reference_configuration(self) -> None:
        """Should compute 1,572,864 for b=64, s=64, l=4096."""
        spec = AttentionSpec(heads=1, head_dim=1, block_size=64, pack_size=64)

        assert complexity_audit(spec, 4096) == 1_572_864

    def test_without_pack(self) -> None:
        """Should reduce to l*4b when s=0."""
        spec = AttentionSpec(heads=1, head_dim=1, block_size=16, pack_size=0)

        assert complexity_audit(spec, 256) == 256 * 64


class TestSymmetry:
    """Tests for exchange symmetry of the biased attention."""

    @pytest.mark.parametrize("attend", [usw_attention_dense, usw_attention_blocked])
    def test_two_token_swap(self, attend, rng: np.random.Generator) -> None:
        """Should swap the two outputs when the two inputs swap and beta equals gamma."""
        spec = AttentionSpec(heads=2, head_dim=3, block_size=2, pack_size=0)
        _, x, _, _, weights = _setup(spec, 2, rng)
        slopes = BiasSlopes.fixed(2, alpha=0.3, beta=[0.5, 1.25], gamma=[0.5, 1.25])
        pos = PositionIds.arange(2)
        swapped = Tensor(x.data[::-1].copy())

        out = attend(x, None, pos, slopes, spec, weights).output.data
        out_swapped = attend(swapped, None, pos, slopes, spec, weights).output.data
        oracle = full_attention(x, x, weights, spec.heads, bias=bialibi_distance(pos, slopes))

        np.testing.assert_allclose(out_swapped, out[::-1], atol=1e-12)
        np.testing.assert_allclose(out, oracle.output.data, atol=1e-12)
