"""Tests for topcorr.core.space.complex."""

from fractions import Fraction

import pytest

from topcorr.core.errors import ComplexError, PointError
from topcorr.core.space.complex import Complex1, Germ, Point, as_fraction


def test_as_fraction_reads_floats_through_their_text() -> None:
    """Test that 0.9 becomes exactly 9/10."""
    assert as_fraction(0.9) == Fraction(9, 10)
    assert as_fraction("1/3") == Fraction(1, 3)


def test_point_rejects_mixed_and_boundary_parameters() -> None:
    """Test that a point is either a vertex or an interior parameter."""
    with pytest.raises(PointError):
        Point(vertex="a", segment=0, t=Fraction(1, 2))
    with pytest.raises(PointError):
        Point.on(0, 1)


def test_complex_point_normalizes_endpoints(unit: Complex1) -> None:
    """Test that parameters 0 and 1 give the endpoint vertices."""
    assert unit.point(1, 0) == Point.at("1/3")
    assert unit.point(1, 1) == Point.at("2/3")
    assert unit.point(1, "1/2") == Point.on(1, Fraction(1, 2))


def test_complex_point_out_of_range(unit: Complex1) -> None:
    """Test that bad segments and parameters raise PointError."""
    with pytest.raises(PointError):
        unit.point(7, Fraction(1, 2))
    with pytest.raises(PointError):
        unit.point(0, 2)


def test_complex_rejects_duplicate_and_dangling_vertices() -> None:
    """Test the structural checks of a complex."""
    with pytest.raises(ComplexError):
        Complex1.build(["a", "a"])
    with pytest.raises(ComplexError, match="unknown vertex"):
        Complex1.build(["a"], [("a", "b")])


def test_germs_at_vertex_and_interior(unit: Complex1) -> None:
    """Test that a middle vertex has two germs and so does an interior point."""
    assert set(unit.germs(Point.at("1/3"))) == {
        Germ(0, Fraction(1), -1), Germ(1, Fraction(0), 1),
    }
    assert len(unit.germs(Point.at("0"))) == 1
    assert len(unit.germs(Point.on(2, Fraction(1, 4)))) == 2


def test_component_labels() -> None:
    """Test that disjoint pieces get distinct component labels."""
    space = Complex1.build(["a", "b", "c"], [("a", "b")])
    assert space.component_of(Point.at("a")) == space.component_of(
        Point.on(0, Fraction(1, 2)))
    assert space.component_of(Point.at("c")) != space.component_of(
        Point.at("a"))


def test_subdivision_moves_points_both_ways(unit: Complex1) -> None:
    """Test that a cut becomes a vertex and interior points are re-parametrized."""
    sub = unit.subdivide({0: [Fraction(1, 2)]})
    assert len(sub.new.segments) == 4
    cut = sub.forward(Point.on(0, Fraction(1, 2)))
    assert cut.is_vertex
    assert sub.backward(cut) == Point.on(0, Fraction(1, 2))
    quarter = Point.on(0, Fraction(1, 4))
    assert sub.backward(sub.forward(quarter)) == quarter
