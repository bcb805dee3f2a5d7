"""Tests for topcorr.core.nest."""

from fractions import Fraction

import numpy as np
import pytest

from topcorr.core.corr import CoefFn, CorrVector
from topcorr.core.errors import (
    EmptyFiberError,
    TriangularizationError,
    WeightBoundError,
)
from topcorr.core.fock import AlgebraElement
from topcorr.core.graph import TopGraph
from topcorr.core.nest import (
    build_nest_rep,
    diagonality_check,
    diagonalize_nest_rep,
    eval_nest_rep,
    rho_family,
)
from topcorr.core.space.complex import Point
from topcorr.core.space.region import Region
from topcorr.services.fixtures import dkflip_e, unit_interval

A, B = Point.at("a"), Point.at("b")
MIDDLE = Point.on(1, Fraction(1, 2))


def test_nest_rep_matrices(d1: TopGraph) -> None:
    """Test pi(f) on the diagonal and t(x) in the corner."""
    rho = build_nest_rep(d1, B, A)
    t_e2 = eval_nest_rep(rho, AlgebraElement.t(CorrVector.delta(d1, "e2")))
    assert np.allclose(t_e2, [[0, 1], [0, 0]])
    pi_a = eval_nest_rep(rho, AlgebraElement.pi(CoefFn.indicator(d1, "a")))
    assert np.allclose(pi_a, [[0, 0], [0, 1]])


def test_nest_rep_is_multiplicative(d1: TopGraph) -> None:
    """Test that products of elements go to products of matrices."""
    rho = build_nest_rep(d1, B, A)
    a = AlgebraElement.pi(CoefFn.from_vertex_values(d1, {"a": 2, "b": 3}))
    b = AlgebraElement.t(CorrVector.constant(d1, 1j))
    assert np.allclose(eval_nest_rep(rho, a * b),
                       eval_nest_rep(rho, a) @ eval_nest_rep(rho, b))


def test_nest_rep_preconditions(d1: TopGraph) -> None:
    """Test the empty fiber and weight bound errors."""
    with pytest.raises(EmptyFiberError):
        build_nest_rep(d1, B, B)
    with pytest.raises(WeightBoundError):
        build_nest_rep(d1, B, A, {Point.at("e2"): 2})


def test_diagonality_follows_the_support(d1: TopGraph) -> None:
    """Test that t(x) is diagonal exactly when x vanishes on the fiber."""
    rho = build_nest_rep(d1, B, A)
    off = diagonality_check(rho, CorrVector.delta(d1, "e1"))
    assert off.diagonal
    assert off.support_off_fiber
    on = diagonality_check(rho, CorrVector.delta(d1, "e2"))
    assert not on.diagonal
    assert on.corner == 1


def test_rho_family_over_the_middle_third() -> None:
    """Test the family built from the two sheets over the middle third."""
    graph = dkflip_e()
    region = Region.open_interval(graph.base, 1, 0, 1)
    sheets = [Region.open_interval(graph.edges, 1, 0, 1),
              Region.open_interval(graph.edges, 4, 0, 1)]
    family = rho_family(graph, region, sheets, [0.6, 0.8])
    assert family.sigma(MIDDLE) == MIDDLE
    value = family.evaluate(MIDDLE,
                            AlgebraElement.t(CorrVector.constant(graph)))
    assert value[0, 1] == pytest.approx(1.4)
    assert family.norm_bound == pytest.approx(2.0)


def test_diagonalize_a_multiple_of_the_difference() -> None:
    """Test beta for a corner equal to 2 (f(u) - f(v))."""
    base = unit_interval()
    u, v = Point.at("0"), Point.at("1")
    result = diagonalize_nest_rep(
        base, u, v, lambda f: 2 * (complex(f(u)) - complex(f(v))))
    assert result.beta == pytest.approx(2)
    assert result.max_residual < 1e-9
    assert result.within_bound
    assert np.allclose(result.matrix @ result.inverse, np.eye(2))


def test_diagonalize_rejects_other_corners() -> None:
    """Test that a corner not vanishing on f(u) = f(v) raises."""
    base = unit_interval()
    u, v = Point.at("0"), Point.at("1")
    with pytest.raises(TriangularizationError):
        diagonalize_nest_rep(base, u, v, lambda f: complex(f(u)))
