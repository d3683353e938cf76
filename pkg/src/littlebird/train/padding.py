"""Padding Insertion for training, and its equivalence with physical padding."""

from __future__ import annotations

from collections.abc import Iterable, Mapping

import numpy as np
import numpy.typing as npt

from littlebird.attention import build_sparsity_mask
from littlebird.exceptions import InputError
from littlebird.logging import get_logger
from littlebird.model import PAD_TOKEN_ID, BaseEncoder, EncoderModel, Impl
from littlebird.posbias import (
    PositionIds,
    apply_gaps,
    insert_virtual_padding,
    sentence_boundaries,
)

logger = get_logger(__name__)


def padded_positions(
    tokens: npt.ArrayLike,
    rng: np.random.Generator,
    prob: float,
    max_gap: int,
    enders: Iterable[int],
) -> PositionIds:
    """
    Position ids with virtual padding after sentence-final tokens.

    Boundaries come from the tokens themselves; index 0 ([CLS]) is never a
    sentence ender, so nothing is ever inserted before it.
    """
    seq = [int(t) for t in np.asarray(tokens).reshape(-1)]
    boundaries = sentence_boundaries(seq, enders)
    return insert_virtual_padding(PositionIds.arange(len(seq)), boundaries, prob, max_gap, rng)


def insert_physical_padding(
    tokens: npt.ArrayLike, gaps: Mapping[int, int]
) -> tuple[npt.NDArray[np.int64], PositionIds, npt.NDArray[np.int64]]:
    """
    Insert `gap` [PAD] tokens after each boundary index.

    Returns:
        The padded tokens, their position ids (pads not real) and the new
        index of every original token.
    """
    seq = np.asarray(tokens, dtype=np.int64).reshape(-1)
    padded: list[int] = []
    real: list[bool] = []
    where: list[int] = []
    for i, token in enumerate(seq):
        where.append(len(padded))
        padded.append(int(token))
        real.append(True)
        gap = gaps.get(i, 0)
        if gap < 0:
            raise InputError(f"Negative padding length {gap} at boundary {i}")
        padded.extend([PAD_TOKEN_ID] * gap)
        real.extend([False] * gap)
    ids = np.arange(len(padded), dtype=np.int64)
    return (
        np.asarray(padded, dtype=np.int64),
        PositionIds(ids, np.asarray(real)),
        np.asarray(where, dtype=np.int64),
    )


def pi_equivalence_check(
    model: BaseEncoder,
    tokens: npt.ArrayLike,
    gaps: Mapping[int, int],
    impl: Impl = "blocked",
) -> float:
    """
    Max abs deviation between physical and virtual padding on real-token outputs.

    (a) runs the model on tokens with [PAD] physically inserted and masked as
    keys; (b) runs it on the original tokens with position ids remapped by the
    same gaps.

    For a LittleBird model the pads must leave every real token's set of real
    window keys unchanged, e.g. when every sequence fits in three blocks.

    Raises:
        InputError: If the pads move real tokens across window boundaries.
    """
    seq = np.asarray(tokens, dtype=np.int64).reshape(-1)
    physical, physical_pos, where = insert_physical_padding(seq, gaps)
    virtual_pos = apply_gaps(PositionIds.arange(seq.size), gaps)

    if isinstance(model, EncoderModel):
        before = build_sparsity_mask(model.spec, seq.size).allowed
        after = build_sparsity_mask(model.spec, physical.size).allowed[np.ix_(where, where)]
        if not np.array_equal(before, after):
            raise InputError(
                "Physical padding changes the attention windows of real tokens",
                block_size=model.spec.block_size,
            )
        virtual = model.encode(seq, virtual_pos, impl=impl).hidden.data
        padded = model.encode(physical, physical_pos, impl=impl).hidden.data
    else:
        virtual = model.encode(seq, virtual_pos).hidden.data
        padded = model.encode(physical, physical_pos).hidden.data

    deviation = float(np.max(np.abs(padded[where] - virtual))) if seq.size else 0.0
    logger.debug("pi_equivalence", deviation=deviation, gaps=len(gaps), kind=model.kind)
    return deviation
