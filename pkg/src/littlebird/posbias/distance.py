"""Distance matrices: causal ALiBi, bidirectional BiALiBi and the pack distance."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import numpy.typing as npt

from littlebird.exceptions import InputError
from littlebird.numkit import Tensor
from littlebird.posbias.positions import PositionIds
from littlebird.posbias.slopes import BiasSlopes

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True)
class DistanceGeometry:
    """
    Slope-free structure of a BiALiBi distance matrix.

    D = alpha·cls + beta·left + gamma·right, where `cls` flags pairs touching
    id 0 (excluding the diagonal), and `left` / `right` hold id differences for
    keys before / after the query.
    """

    cls: FloatArray
    left: FloatArray
    right: FloatArray


def alibi_distance(length: int, slope: float) -> Tensor:
    """
    Causal ALiBi distances: m·(i−j) on and below the diagonal, +inf above it.

    The +inf entries mark keys a causal query may not attend.
    """
    i = np.arange(length)[:, None]
    j = np.arange(length)[None, :]
    return Tensor(np.where(i >= j, slope * (i - j), np.inf))


def distance_geometry(query_ids: npt.ArrayLike, key_ids: npt.ArrayLike) -> DistanceGeometry:
    """
    Geometry between query ids (..., q) and key ids (..., k), shape (..., q, k).

    Case precedence: equal ids give 0, then any pair touching id 0 gets the
    alpha flag, then left/right distances.
    """
    q = np.ascontiguousarray(query_ids, dtype=np.int64)
    k = np.ascontiguousarray(key_ids, dtype=np.int64)
    return _cached_geometry(q.tobytes(), q.shape, k.tobytes(), k.shape)


@lru_cache(maxsize=32)
def _cached_geometry(
    q_bytes: bytes, q_shape: tuple[int, ...], k_bytes: bytes, k_shape: tuple[int, ...]
) -> DistanceGeometry:
    qi = np.frombuffer(q_bytes, dtype=np.int64).reshape(q_shape)[..., :, None]
    kj = np.frombuffer(k_bytes, dtype=np.int64).reshape(k_shape)[..., None, :]
    same = qi == kj
    touches_cls = ((qi == 0) | (kj == 0)) & ~same
    plain = ~same & ~touches_cls
    diff = (qi - kj).astype(np.float64)
    geometry = DistanceGeometry(
        cls=touches_cls.astype(np.float64),
        left=np.where(plain & (diff > 0), diff, 0.0),
        right=np.where(plain & (diff < 0), -diff, 0.0),
    )
    for part in (geometry.cls, geometry.left, geometry.right):
        part.setflags(write=False)
    return geometry


def bias_from_geometry(geometry: DistanceGeometry, slopes: BiasSlopes) -> Tensor:
    """Per-head distances, shape (H, *geometry shape); differentiable in the slopes."""
    head_shape = (slopes.heads,) + (1,) * geometry.cls.ndim
    return (
        slopes.alpha.reshape(*head_shape) * geometry.cls
        + slopes.beta.reshape(*head_shape) * geometry.left
        + slopes.gamma.reshape(*head_shape) * geometry.right
    )


def bialibi_distance(pos: PositionIds, slopes: BiasSlopes) -> Tensor:
    """
    Bidirectional ALiBi distance matrix D of shape (H, l, l).

    D[i][j] = 0 if id_i = id_j; alpha if either id is 0; beta·(id_i − id_j)
    for keys on the left; gamma·(id_j − id_i) for keys on the right.
    """
    if not isinstance(pos, PositionIds):
        raise InputError("bialibi_distance expects PositionIds")
    return bias_from_geometry(distance_geometry(pos.ids, pos.ids), slopes)


def pack_distance(pack_len: int, length: int, slopes: BiasSlopes, block_size: int) -> Tensor:
    """Pack distance D_P of shape (H, s, l): constant ((beta + gamma) / 2)·b per head."""
    if pack_len < 0:
        raise InputError(f"Pack length must be non-negative, got {pack_len}")
    per_head = (slopes.beta + slopes.gamma) * (block_size / 2.0)
    return per_head.reshape(slopes.heads, 1, 1) * np.ones((pack_len, length))
