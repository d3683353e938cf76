"""Attention geometry: block layout, sparsity masks and score accounting."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import numpy.typing as npt

from littlebird.config import ModelConfig
from littlebird.exceptions import ConfigurationError, DimensionError

BoolArray = npt.NDArray[np.bool_]
IntArray = npt.NDArray[np.int64]

# Key slots of one query block in the blocked layout: global, left, self, right.
KEY_SLOTS = 4
GLOBAL_BLOCK = 0


@dataclass(frozen=True)
class AttentionSpec:
    """
    Geometry of one attention layer.

    Neighbor windows are non-circular and block 0 is the global block; every
    query block, block 0 included, follows the same rule (self, left and right
    neighbors, block 0, pack).
    """

    heads: int
    head_dim: int
    block_size: int
    pack_size: int

    def __post_init__(self) -> None:
        if self.heads < 1 or self.head_dim < 1:
            raise ConfigurationError(
                f"heads and head_dim must be positive, got {self.heads}, {self.head_dim}"
            )
        if self.block_size < 1:
            raise ConfigurationError(f"block_size must be >= 1, got {self.block_size}")
        if self.pack_size < 0:
            raise ConfigurationError(f"pack_size must be >= 0, got {self.pack_size}")

    @classmethod
    def from_model_config(cls, config: ModelConfig) -> AttentionSpec:
        return cls(
            heads=config.heads,
            head_dim=config.head_dim,
            block_size=config.block_size,
            pack_size=config.pack_size,
        )

    @property
    def model_dim(self) -> int:
        return self.heads * self.head_dim

    def padded_length(self, length: int) -> int:
        """Smallest multiple of the block size that holds `length` tokens."""
        b = self.block_size
        return max(1, -(-length // b)) * b

    def num_blocks(self, length: int) -> int:
        if length % self.block_size:
            raise DimensionError(
                f"Length {length} is not a multiple of block size {self.block_size}",
                length=length,
                block_size=self.block_size,
            )
        return length // self.block_size


@dataclass(frozen=True)
class SparsityMask:
    """
    Allowed query-key pairs over the X keys; the s pack keys are always allowed.

    Attributes:
        allowed: (l, l) boolean, True where query i may attend key j.
        pack_size: Number of pack keys visible to every query.
    """

    allowed: BoolArray
    pack_size: int

    @property
    def length(self) -> int:
        return int(self.allowed.shape[0])

    def with_key_validity(self, key_valid: npt.ArrayLike) -> SparsityMask:
        """Drop keys that are not real tokens."""
        valid = np.asarray(key_valid, dtype=bool)
        if valid.shape != (self.length,):
            raise DimensionError(
                f"key validity {valid.shape} does not match length {self.length}"
            )
        return SparsityMask(self.allowed & valid[None, :], self.pack_size)

    def joint(self) -> BoolArray:
        """(l, s + l) mask over [pack keys; X keys]."""
        pack = np.ones((self.length, self.pack_size), dtype=bool)
        return np.concatenate([pack, self.allowed], axis=1)


def build_sparsity_mask(spec: AttentionSpec, length: int) -> SparsityMask:
    """
    Window-plus-global mask by array index: key block within one of the query
    block, or key block 0.
    """
    block = np.arange(length) // spec.block_size
    allowed = (np.abs(block[:, None] - block[None, :]) <= 1) | (block[None, :] == GLOBAL_BLOCK)
    return SparsityMask(allowed, spec.pack_size)


def allowed_key_counts(mask: SparsityMask) -> npt.NDArray[np.int64]:
    """Keys each query may attend, pack keys included."""
    return mask.allowed.sum(axis=1).astype(np.int64) + mask.pack_size


@lru_cache(maxsize=64)
def block_layout(num_blocks: int) -> tuple[IntArray, BoolArray]:
    """
    Key-block indices and slot validity for every query block.

    Row j lists [global, left, self, right] = [0, j−1, j, j+1] clipped into
    range. The global slot is valid only for j >= 2 (for j < 2 block 0 is
    already self or left); left is valid for j >= 1 and right for j <= nb−2.
    """
    j = np.arange(num_blocks)
    index = np.stack([np.zeros_like(j), j - 1, j, j + 1], axis=1)
    valid = np.stack([j >= 2, j >= 1, np.ones_like(j, dtype=bool), j <= num_blocks - 2], axis=1)
    index = np.clip(index, 0, num_blocks - 1)
    index.setflags(write=False)
    valid.setflags(write=False)
    return index, valid


class ScoreAudit:
    """
    Counts query-key score entries computed.

    The count is per query-key pair, independent of the number of heads.
    Increments are locked so kernels may run from several threads.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._count = 0

    @property
    def count(self) -> int:
        return self._count

    def add(self, entries: int) -> None:
        if entries < 0:
            raise ValueError(f"Score count increments must be non-negative, got {entries}")
        with self._lock:
            self._count += entries

    def reset(self) -> None:
        with self._lock:
            self._count = 0


def complexity_audit(spec: AttentionSpec, length: int) -> int:
    """Upper bound l·(4b+s) + l·s on scores computed by one LittleBird layer."""
    b, s = spec.block_size, spec.pack_size
    return length * (4 * b + s) + length * s


def dense_score_count(length: int) -> int:
    """Scores computed by full self-attention over `length` tokens."""
    return length * length
