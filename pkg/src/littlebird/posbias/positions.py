"""Position ids and Padding Insertion.

Distances in BiALiBi are computed from position ids, not array indices, so
virtual padding is just a remapping of ids: every token after an insertion
point moves right by the padding length.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from littlebird.exceptions import InputError

IntArray = npt.NDArray[np.int64]
BoolArray = npt.NDArray[np.bool_]


@dataclass(frozen=True, eq=False)
class PositionIds:
    """
    Position id per token plus a real-token flag.

    Ids are non-negative and strictly increasing along the sequence; when id 0
    is present it belongs to the first token, which must be real.
    """

    ids: IntArray
    real: BoolArray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        ids = np.array(self.ids, dtype=np.int64).reshape(-1)
        real = (
            np.ones(ids.shape, dtype=bool)
            if self.real is None
            else np.array(self.real, dtype=bool).reshape(-1)
        )
        if real.shape != ids.shape:
            raise InputError(
                f"real flags ({real.size}) and ids ({ids.size}) differ in length"
            )
        if ids.size and ids.min() < 0:
            raise InputError("Position ids must be non-negative", first=int(ids.min()))
        if ids.size > 1 and not np.all(np.diff(ids) > 0):
            bad = int(np.argmin(np.diff(ids) > 0)) + 1
            raise InputError("Position ids must be strictly increasing", index=bad)
        if ids.size and ids[0] == 0 and not real[0]:
            raise InputError("Position id 0 must belong to a real token")
        ids.setflags(write=False)
        real.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "real", real)

    @classmethod
    def arange(cls, length: int, start: int = 0) -> PositionIds:
        return cls(np.arange(start, start + length, dtype=np.int64))

    def __len__(self) -> int:
        return int(self.ids.size)

    def shifted(self, offset: int) -> PositionIds:
        """All ids moved by `offset`."""
        return PositionIds(self.ids + offset, self.real)

    def padded_to(self, length: int) -> PositionIds:
        """Append non-real tokens with ids continuing after the last id."""
        extra = length - len(self)
        if extra <= 0:
            return self
        last = int(self.ids[-1]) if len(self) else -1
        ids = np.concatenate([self.ids, np.arange(last + 1, last + 1 + extra)])
        real = np.concatenate([self.real, np.zeros(extra, dtype=bool)])
        return PositionIds(ids, real)


def sentence_boundaries(tokens: Sequence[int], enders: Iterable[int]) -> list[int]:
    """Indices of sentence-final tokens that have a successor (candidate insertion points)."""
    ender_set = set(enders)
    return [i for i, tok in enumerate(tokens[:-1]) if tok in ender_set]


def draw_padding_gaps(
    boundaries: Iterable[int],
    prob: float,
    max_len: int,
    rng: np.random.Generator,
) -> dict[int, int]:
    """
    Decide where virtual padding goes.

    Each boundary independently receives padding with probability `prob`;
    the padding length is uniform over [0, max_len].

    Returns:
        Mapping boundary index -> padding length, for boundaries that fired.
    """
    if not 0.0 <= prob <= 1.0:
        raise InputError(f"Padding probability must be in [0, 1], got {prob}")
    if max_len < 0:
        raise InputError(f"Padding length must be non-negative, got {max_len}")
    gaps: dict[int, int] = {}
    for boundary in sorted(set(boundaries)):
        if rng.random() < prob:
            gaps[boundary] = int(rng.integers(0, max_len + 1))
    return gaps


def apply_gaps(pos: PositionIds, gaps: Mapping[int, int]) -> PositionIds:
    """
    Shift ids after each boundary by its padding length.

    A gap at boundary i moves tokens i+1, i+2, ... right; real-token flags
    and token order are unchanged.
    """
    shift = np.zeros(len(pos), dtype=np.int64)
    for boundary, gap in gaps.items():
        if not 0 <= boundary < len(pos):
            raise InputError(f"Boundary {boundary} outside sequence of length {len(pos)}")
        if gap < 0:
            raise InputError(f"Negative padding length {gap} at boundary {boundary}")
        shift[boundary + 1 :] += gap
    return PositionIds(pos.ids + shift, pos.real)


def insert_virtual_padding(
    pos: PositionIds,
    boundaries: Iterable[int],
    prob: float,
    max_len: int,
    rng: np.random.Generator,
) -> PositionIds:
    """Padding Insertion: randomly remap ids as if pads were inserted at boundaries."""
    return apply_gaps(pos, draw_padding_gaps(boundaries, prob, max_len, rng))
