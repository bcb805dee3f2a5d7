"""Tests for topcorr.core.characters."""

from fractions import Fraction

import numpy as np
import pytest

from topcorr.core.characters import (
    CharacterPoint,
    character_coordinates,
    eval_character,
    expectation,
    fiber_dimension,
    make_bumps,
)
from topcorr.core.corr import CoefFn, CorrVector, corr_norm
from topcorr.core.equiv.verify import random_vector
from topcorr.core.errors import BumpError, PointError
from topcorr.core.fock import AlgebraElement
from topcorr.core.graph import TopGraph
from topcorr.core.space.complex import Point
from topcorr.core.space.field import ScalarField
from topcorr.services import fixtures
from topcorr.services.fixtures import dkflip_e

MIDDLE = Point.on(1, Fraction(1, 2))


def test_fiber_dimension_counts_loops(d1: TopGraph) -> None:
    """Test the character ball dimensions of D1 and DKFLIP_E."""
    assert fiber_dimension(d1, Point.at("a"))[0] == 1
    assert fiber_dimension(d1, Point.at("b"))[0] == 0
    graph = dkflip_e()
    assert fiber_dimension(graph, MIDDLE)[0] == 2
    assert fiber_dimension(graph, Point.at("1"))[0] == 1


def test_character_values(d1: TopGraph) -> None:
    """Test theta(pi(f) + t(x)) = f(v) + z x(e1)."""
    theta = CharacterPoint.at(d1, Point.at("a"), [0.5])
    f = CoefFn.from_vertex_values(d1, {"a": 3, "b": 7})
    x = CorrVector.from_edge_values(d1, {"e1": 2, "e2": 5})
    element = AlgebraElement.pi(f) + AlgebraElement.t(x)
    assert eval_character(theta, element) == pytest.approx(3 + 0.5 * 2)
    square = AlgebraElement.t(x) * AlgebraElement.t(x)
    assert eval_character(theta, square) == pytest.approx(1.0)


def test_character_is_multiplicative(d1: TopGraph) -> None:
    """Test that a character respects products."""
    theta = CharacterPoint.at(d1, Point.at("a"), [0.3 + 0.4j])
    a = AlgebraElement.pi(CoefFn.constant(d1, 2)) + AlgebraElement.t(
        CorrVector.delta(d1, "e1"))
    b = AlgebraElement.t(CorrVector.constant(d1, 1j))
    assert eval_character(theta, a * b) == pytest.approx(
        eval_character(theta, a) * eval_character(theta, b))


def test_coordinates_outside_the_ball(d1: TopGraph) -> None:
    """Test that z must have the right length and norm at most 1."""
    with pytest.raises(PointError):
        CharacterPoint.at(d1, Point.at("a"), [0.8, 0.1])
    with pytest.raises(PointError, match="norm"):
        CharacterPoint.at(d1, Point.at("a"), [1.5])


def test_bump_coordinates_recover_z() -> None:
    """Test that the canonical bumps read back the ball coordinates."""
    graph = dkflip_e()
    bumps = make_bumps(graph, MIDDLE)
    assert len(bumps.bumps) == 2
    theta = CharacterPoint.at(graph, MIDDLE, [0.6, 0.8j])
    coords = character_coordinates(graph, MIDDLE, bumps, theta)
    assert abs(coords[0] - 0.6) < 1e-12
    assert abs(coords[1] - 0.8j) < 1e-12


def test_bumps_are_disjoint_and_equal_one_at_their_loop() -> None:
    """Test the support of each bump."""
    graph = dkflip_e()
    bumps = make_bumps(graph, MIDDLE)
    first, second = bumps.bumps
    e1, e2 = bumps.loops
    assert first(e1) == 1
    assert second(e2) == 1
    assert first(e2) == 0
    assert second(e1) == 0
    assert e1 in bumps.inner[0]
    assert bumps.inner[0].issubset(bumps.outer[0])


def test_no_loops_gives_an_empty_family(d1: TopGraph) -> None:
    """Test that a vertex without loops has no bumps."""
    assert make_bumps(d1, Point.at("b")).bumps == ()


def test_bumps_over_another_point_raise() -> None:
    """Test that bumps and character must sit over the same point."""
    graph = dkflip_e()
    bumps = make_bumps(graph, Point.at("1"))
    theta = CharacterPoint.at(graph, MIDDLE)
    with pytest.raises(BumpError):
        character_coordinates(graph, MIDDLE, bumps, theta)


def test_expectation_keeps_degree_zero(d1: TopGraph) -> None:
    """Test that the expectation drops every tensor term."""
    f = CoefFn.from_vertex_values(d1, {"a": 3, "b": 7})
    x = CorrVector.constant(d1)
    assert expectation(AlgebraElement.pi(f) + AlgebraElement.t(x))(
        Point.at("b")) == 7
    assert expectation(AlgebraElement.t(x))(Point.at("a")) == 0


def test_vectors_vanishing_on_the_loops_are_killed() -> None:
    """Test theta(t(x)) = 0 when x vanishes on every loop over v."""
    graph = dkflip_e()
    _, fiber = fiber_dimension(graph, MIDDLE)
    vertex_values = dict.fromkeys(graph.edges.vertices, Fraction(1))
    interior: dict[int, dict[Fraction, Fraction]] = {}
    for e in fiber.edges:
        if e.vertex is not None:
            vertex_values[e.vertex] = Fraction(0)
        else:
            interior.setdefault(e.segment, {})[e.t] = Fraction(0)
    masked = CorrVector(graph, ScalarField.piecewise_linear(
        graph.edges, vertex_values, interior))
    rng = np.random.default_rng(3)
    for _ in range(10):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        z = z / (np.linalg.norm(z) * 1.01)
        theta = CharacterPoint.at(graph, MIDDLE, list(z))
        assert eval_character(theta, AlgebraElement.t(masked)) == 0


def test_characters_are_contractive_on_vectors() -> None:
    """Test |theta(t(x))| <= |z| * ||x|| on random PL vectors."""
    graph = dkflip_e()
    theta = CharacterPoint.at(graph, MIDDLE, [0.6, 0.8j])
    rng = np.random.default_rng(5)
    for _ in range(5):
        x = CorrVector(graph, random_vector(graph.edges, rng))
        value = eval_character(theta, AlgebraElement.t(x))
        assert abs(value) <= corr_norm(x) + 1e-12


def _random_polynomial(
    graph: TopGraph,
    rng: np.random.Generator,
) -> AlgebraElement:
    def t(k: int) -> AlgebraElement:
        out = AlgebraElement.t(CorrVector(graph, random_vector(graph.edges,
                                                               rng)))
        for _ in range(k - 1):
            out = out * AlgebraElement.t(
                CorrVector(graph, random_vector(graph.edges, rng)))
        return out

    f = CoefFn(graph, random_vector(graph.base, rng))
    return AlgebraElement.pi(f) + t(1) + t(2) + t(3)


@pytest.mark.parametrize(("graph", "v"), [
    (dkflip_e(), MIDDLE),
    (dkflip_e(), Point.on(0, Fraction(1, 2))),
    (fixtures.d1(), Point.at("a")),
])
def test_characters_are_multiplicative_on_random_pairs(
    graph: TopGraph,
    v: Point,
) -> None:
    """Test theta(ab) = theta(a) theta(b) on 100 random cubic pairs."""
    rng = np.random.default_rng(19)
    n, _ = fiber_dimension(graph, v)
    for _ in range(100):
        z = rng.normal(size=n) + 1j * rng.normal(size=n)
        z = z * rng.uniform(0, 1) / max(np.linalg.norm(z), 1e-12)
        theta = CharacterPoint.at(graph, v, list(z))
        a, b = _random_polynomial(graph, rng), _random_polynomial(graph, rng)
        assert eval_character(theta, a * b) == pytest.approx(
            eval_character(theta, a) * eval_character(theta, b),
            rel=1e-12, abs=1e-12)
