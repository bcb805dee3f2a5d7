"""Tests for topcorr.core.space.knots."""

from fractions import Fraction

import pytest

from topcorr.core.errors import PointError
from topcorr.core.space.complex import Complex1, Point
from topcorr.core.space.knots import KnotSet, evenly_covered_star
from topcorr.services.fixtures import circle_e, dkflip_e

HALF = Fraction(1, 2)


def test_vertex_star_reaches_the_next_knots(unit: Complex1) -> None:
    """Test the open star of a middle vertex."""
    star = KnotSet.trivial(unit).star(Point.at("1/3"))
    assert Point.on(0, HALF) in star
    assert Point.on(1, HALF) in star
    assert Point.at("0") not in star
    assert star.is_open()


def test_star_of_non_knot_raises(unit: Complex1) -> None:
    """Test that only knots have stars."""
    with pytest.raises(PointError):
        KnotSet.trivial(unit).star(Point.on(0, HALF))


def test_evenly_covered_star_has_one_sheet_per_copy() -> None:
    """Test the star of an interior point of the identity and clamp system."""
    graph = dkflip_e()
    star, sheets = evenly_covered_star(graph.s, graph.r, Point.on(1, HALF))
    assert Point.on(1, HALF) in star
    assert len(sheets) == 2
    assert Point.on(1, HALF) in sheets[0]
    assert Point.on(4, HALF) in sheets[1]


def test_graph_knots_break_loops() -> None:
    """Test that base knots include the rotation's vertices and stay finite."""
    graph = circle_e()
    knots = graph.knots()
    assert knots.base.is_knot(Point.at("0"))
    for v in graph.base.vertices:
        assert len(graph.s.preimage(Point.at(v))) == 2
    assert knots.edges.size() >= knots.base.size()
