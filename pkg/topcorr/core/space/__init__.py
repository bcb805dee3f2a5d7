"""Geometric substrate: complexes, PL maps, fields, regions and covers."""

from topcorr.core.space.complex import (
    ONE,
    ZERO,
    Complex1,
    Germ,
    Point,
    Segment,
    Subdivision,
    as_fraction,
    sort_points,
)
from topcorr.core.space.field import ScalarField
from topcorr.core.space.knots import GraphKnots, KnotSet, evenly_covered_star
from topcorr.core.space.partition import (
    Cover,
    Direction,
    partition_of_unity,
    separating_function,
    threshold_set,
)
from topcorr.core.space.plmap import Piece, PLMap, SegmentImage
from topcorr.core.space.region import (
    Interval,
    OpenSet,
    Region,
    image_region,
    maps_agree_on,
    preimage_region,
    subdivide_region,
)

__all__ = [
    "ONE",
    "ZERO",
    "Complex1",
    "Cover",
    "Direction",
    "Germ",
    "GraphKnots",
    "Interval",
    "KnotSet",
    "OpenSet",
    "PLMap",
    "Piece",
    "Point",
    "Region",
    "ScalarField",
    "Segment",
    "SegmentImage",
    "Subdivision",
    "as_fraction",
    "evenly_covered_star",
    "image_region",
    "maps_agree_on",
    "partition_of_unity",
    "preimage_region",
    "separating_function",
    "sort_points",
    "subdivide_region",
    "threshold_set",
]
