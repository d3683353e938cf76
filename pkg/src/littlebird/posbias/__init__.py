"""Positional biasing: ALiBi, BiALiBi, pack distance and Padding Insertion."""

from littlebird.posbias.distance import (
    DistanceGeometry,
    alibi_distance,
    bialibi_distance,
    bias_from_geometry,
    distance_geometry,
    pack_distance,
)
from littlebird.posbias.positions import (
    PositionIds,
    apply_gaps,
    draw_padding_gaps,
    insert_virtual_padding,
    sentence_boundaries,
)
from littlebird.posbias.slopes import BiasSlopes, alibi_slopes

__all__ = [
    "BiasSlopes",
    "DistanceGeometry",
    "PositionIds",
    "alibi_distance",
    "alibi_slopes",
    "apply_gaps",
    "bialibi_distance",
    "bias_from_geometry",
    "distance_geometry",
    "draw_padding_gaps",
    "insert_virtual_padding",
    "pack_distance",
    "sentence_boundaries",
]
