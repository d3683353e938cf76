"""Unit tests for the LittleBird layer."""

import numpy as np

from littlebird.config import ModelConfig
from littlebird.model import LittleBirdLayer
from littlebird.numkit import ParamStore, Tensor, grad_check, ops
from littlebird.posbias import PositionIds


def _layer(config: ModelConfig, rng: np.random.Generator) -> tuple[ParamStore, LittleBirdLayer]:
    store = ParamStore()
    return store, LittleBirdLayer(store, "layers.0", config, rng)


class TestLittleBirdLayer:
    """Tests for layer_forward."""

    def test_output_shapes(self, tiny_config: ModelConfig, rng: np.random.Generator) -> None:
        """Should return X' of shape (l, d) and P' of shape (s, d)."""
        _, layer = _layer(tiny_config, rng)
        x = Tensor(rng.normal(size=(8, 8)))
        pack = Tensor(rng.normal(size=(2, 8)))

        out = layer(x, pack, PositionIds.arange(8))

        assert out.hidden.shape == (8, 8)
        assert out.pack is not None
        assert out.pack.shape == (2, 8)
        assert out.pack_attention is not None

    def test_zero_ffn_keeps_residual(self, tiny_config: ModelConfig, rng: np.random.Generator) -> None:
        """Should reduce to LN(A) when the FFN is zeroed."""
        store, layer = _layer(tiny_config, rng)
        for name, tensor in store.items():
            if ".ffn." in name:
                tensor.data[...] = 0.0
        x = Tensor(rng.normal(size=(8, 8)))
        pack = Tensor(rng.normal(size=(2, 8)))

        out = layer(x, pack, PositionIds.arange(8))

        mixed = ops.layer_norm(
            out.attention.output + x, layer.attn_norm.gain, layer.attn_norm.shift
        )
        expected = ops.layer_norm(mixed, layer.ffn_norm.gain, layer.ffn_norm.shift)
        np.testing.assert_allclose(out.hidden.data, expected.data, atol=1e-12)

    def test_without_pack(self, rng: np.random.Generator) -> None:
        """Should run the window-plus-global model when s=0."""
        config = ModelConfig(vocab_size=8, d_model=4, heads=2, layers=1, block_size=4, pack_size=0)
        store, layer = _layer(config, rng)

        out = layer(Tensor(rng.normal(size=(12, 4))), None, PositionIds.arange(12))

        assert out.pack is None
        assert not any(name.startswith("layers.0.pack") for name in store)

    def test_full_layer_gradient(self, tiny_config: ModelConfig, rng: np.random.Generator) -> None:
        """Should pass a gradient check over every layer parameter, X and P."""
        store, layer = _layer(tiny_config, rng)
        x = store.register("x", Tensor(rng.normal(size=(12, 8))))
        pack = store.register("pack", Tensor(rng.normal(size=(2, 8))))
        pos = PositionIds(np.array([0, 1, 2, 5, 6, 7, 8, 9, 12, 13, 14, 15]))
        probe_x = rng.normal(size=(12, 8))
        probe_p = rng.normal(size=(2, 8))

        def loss() -> Tensor:
            out = layer(x, pack, pos)
            assert out.pack is not None
            return ops.sum(out.hidden * probe_x) + ops.sum(out.pack * probe_p)

        assert grad_check(loss, store, max_entries=8, rng=rng) < 1e-4
