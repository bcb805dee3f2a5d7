"""Tests for topcorr.core.space.partition."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topcorr.core.errors import CoverError
from topcorr.core.space.complex import Complex1, Point
from topcorr.core.space.field import ScalarField
from topcorr.core.space.partition import (
    Cover,
    Direction,
    level_set,
    partition_of_unity,
    separating_function,
    threshold_set,
)
from topcorr.core.space.region import Region
from topcorr.services.fixtures import lower_part, unit_interval, upper_part

HALF = Fraction(1, 2)


def test_partition_sums_to_one(unit: Complex1) -> None:
    """Test that the partition of the canonical two-set cover sums to 1."""
    cover = Cover.of(unit, [lower_part(), upper_part()])
    f_lower, f_upper = partition_of_unity(cover)
    for p in unit.sample_points(7):
        assert f_lower(p) + f_upper(p) == 1
        assert 0 <= f_lower(p) <= 1


def test_partition_is_supported_inside_each_set(unit: Complex1) -> None:
    """Test that each function vanishes off its set."""
    f_lower, f_upper = partition_of_unity(
        Cover.of(unit, [lower_part(), upper_part()]))
    assert f_lower(Point.at("1")) == 0
    assert f_upper(Point.at("0")) == 0
    assert f_lower(Point.on(2, HALF)) == 0


def test_partition_requires_a_cover(unit: Complex1) -> None:
    """Test that a missed point raises CoverError."""
    with pytest.raises(CoverError, match="not covered"):
        partition_of_unity(Cover.of(unit, [lower_part()]))


def test_threshold_and_level_sets(unit: Complex1) -> None:
    """Test sets cut out of the identity coordinate."""
    f = ScalarField.from_vertex_values(
        unit, {"0": 0, "1/3": Fraction(1, 3), "2/3": Fraction(2, 3), "1": 1})
    above = threshold_set(f, HALF)
    assert Point.on(1, Fraction(3, 4)) in above
    assert Point.on(1, HALF) not in above
    below = threshold_set(f, HALF, Direction.BELOW)
    assert Point.on(1, Fraction(1, 4)) in below
    band = threshold_set(f, Fraction(1, 3), Direction.BAND, Fraction(2, 3))
    assert band == Region.open_interval(unit, 1, 0, 1)
    assert level_set(f, HALF) == Region.point(unit, Point.on(1, HALF))


def test_band_needs_upper_level(unit: Complex1) -> None:
    """Test that a band without upper level is a ValueError."""
    with pytest.raises(ValueError, match="upper level"):
        threshold_set(ScalarField.zero(unit), HALF, Direction.BAND)


def test_separating_function(unit: Complex1) -> None:
    """Test a function that is 1 near 0 and 0 near 1."""
    g = separating_function(unit, Region.point(unit, Point.at("0")),
                            Region.point(unit, Point.at("1")))
    assert g(Point.at("0")) == 1
    assert g(Point.at("1")) == 0
    with pytest.raises(CoverError):
        separating_function(unit, lower_part().closure(),
                            upper_part().closure())


_VALUES = st.fractions(min_value=-2, max_value=2, max_denominator=6)


@settings(max_examples=60, deadline=None)
@given(
    values=st.lists(_VALUES, min_size=4, max_size=4),
    level=_VALUES,
    square=st.booleans(),
    t=st.fractions(min_value=0, max_value=1, max_denominator=97),
)
def test_threshold_sides_partition_the_interval(
    values: list[Fraction],
    level: Fraction,
    square: bool,
    t: Fraction,
) -> None:
    """Test that above, below and the level set split every sampled point."""
    space = unit_interval()
    f = ScalarField.from_vertex_values(
        space, dict(zip(space.vertices, values, strict=True)))
    if square:
        f = f * f
    above = threshold_set(f, level)
    below = threshold_set(f, level, Direction.BELOW)
    level_points = level_set(f, level)
    samples = list(space.sample_points(11))
    if 0 < t < 1:
        samples.extend(Point.on(j, t) for j in range(len(space.segments)))
    for p in samples:
        value = f(p)
        assert (p in above) == (value > level)
        assert (p in below) == (value < level)
        assert (p in level_points) == (value == level)
