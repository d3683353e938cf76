"""Trainable building blocks: linear maps, layer norm and the feed-forward block."""

from __future__ import annotations

import numpy as np

from littlebird.numkit import ops
from littlebird.numkit.params import ParamStore
from littlebird.numkit.tensor import Tensor


class LinearMap:
    """Affine map x·W + b with W of shape (d_in, d_out)."""

    def __init__(
        self,
        store: ParamStore,
        name: str,
        d_in: int,
        d_out: int,
        rng: np.random.Generator,
        init_std: float = 0.02,
        bias: bool = True,
    ) -> None:
        self.d_in = d_in
        self.d_out = d_out
        self.weight = store.register(
            f"{name}.weight", Tensor(rng.normal(0.0, init_std, size=(d_in, d_out)))
        )
        self.bias = store.register(f"{name}.bias", Tensor(np.zeros(d_out))) if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        out = ops.matmul(x, self.weight)
        if self.bias is not None:
            out = out + self.bias
        return out

    def copy_from(self, other: LinearMap) -> None:
        self.weight.data[...] = other.weight.data
        if self.bias is not None and other.bias is not None:
            self.bias.data[...] = other.bias.data


class LayerNorm:
    """Gain/shift pair applied after normalization; gain starts at 1, shift at 0."""

    def __init__(self, store: ParamStore, name: str, dim: int) -> None:
        self.gain = store.register(f"{name}.gain", Tensor(np.ones(dim)))
        self.shift = store.register(f"{name}.shift", Tensor(np.zeros(dim)))

    def __call__(self, x: Tensor) -> Tensor:
        return ops.layer_norm(x, self.gain, self.shift)

    def copy_from(self, other: LayerNorm) -> None:
        self.gain.data[...] = other.gain.data
        self.shift.data[...] = other.shift.data


class FeedForward:
    """Two linear maps with GELU between; hidden width multiplier·d."""

    def __init__(
        self,
        store: ParamStore,
        name: str,
        dim: int,
        rng: np.random.Generator,
        multiplier: int = 4,
        init_std: float = 0.02,
    ) -> None:
        self.inner = LinearMap(store, f"{name}.inner", dim, multiplier * dim, rng, init_std)
        self.outer = LinearMap(store, f"{name}.outer", multiplier * dim, dim, rng, init_std)

    def __call__(self, x: Tensor) -> Tensor:
        return self.outer(ops.gelu(self.inner(x)))

    def copy_from(self, other: FeedForward) -> None:
        self.inner.copy_from(other.inner)
        self.outer.copy_from(other.outer)
