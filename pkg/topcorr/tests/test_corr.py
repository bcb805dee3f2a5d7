"""Tests for topcorr.core.corr."""

import math
from fractions import Fraction

import numpy as np
import pytest

from topcorr.core.corr import (
    CoefFn,
    CorrVector,
    TensorVector,
    act,
    corr_norm,
    inner_product,
    tensor_inner_product,
)
from topcorr.core.equiv.verify import random_vector
from topcorr.core.errors import DegreeMismatchError, GraphMismatchError
from topcorr.core.graph import TopGraph
from topcorr.core.space.complex import Point
from topcorr.services.fixtures import GRAPH_FIXTURES, d1_plus, dkflip_e

A, B = Point.at("a"), Point.at("b")


def test_bimodule_action_uses_range_and_source(d1: TopGraph) -> None:
    """Test that (f.x.g)(e) = f(r(e)) x(e) g(s(e))."""
    x = CorrVector.constant(d1)
    f = CoefFn.from_vertex_values(d1, {"a": 2, "b": 3})
    g = CoefFn.from_vertex_values(d1, {"a": 5, "b": 7})
    y = act(f, x, g)
    assert y(Point.at("e2")) == 3 * 5
    assert y(Point.at("e3")) == 2 * 7
    assert act(None, x, None)(Point.at("e1")) == 1


def test_inner_product_sums_over_source_fibers(d1: TopGraph) -> None:
    """Test the inner product of the constant vector of D1."""
    one = CorrVector.constant(d1)
    ip = inner_product(one, one)
    assert ip(A) == 2
    assert ip(B) == 1
    assert corr_norm(one) == pytest.approx(math.sqrt(2))


def test_inner_product_is_conjugate_linear(d1: TopGraph) -> None:
    """Test that the left slot is conjugated."""
    x = CorrVector.delta(d1, "e1").scale(1j)
    y = CorrVector.delta(d1, "e1")
    assert inner_product(x, y)(A) == -1j


def test_inner_product_on_a_pl_graph() -> None:
    """Test that both copies contribute everywhere on DKFLIP_E."""
    graph = dkflip_e()
    one = CorrVector.constant(graph)
    ip = inner_product(one, one)
    for p in graph.base.sample_points(3):
        assert ip(p) == 2


def test_tensor_inner_product(d1: TopGraph) -> None:
    """Test a degree-two inner product through the recursive formula."""
    e1 = CorrVector.delta(d1, "e1")
    e3 = CorrVector.delta(d1, "e3")
    u = TensorVector.elementary([e1, e3])
    assert tensor_inner_product(u, u)(B) == 1
    assert tensor_inner_product(u, u)(A) == 0
    w = TensorVector.elementary([e1, e1], coefficient=Fraction(1, 2))
    assert tensor_inner_product(u, w)(A) == 0


def test_degree_and_graph_mismatches(d1: TopGraph) -> None:
    """Test the errors for mixed degrees and mixed graphs."""
    x = CorrVector.constant(d1)
    with pytest.raises(DegreeMismatchError):
        TensorVector.elementary([x]) + TensorVector.elementary([x, x])
    with pytest.raises(GraphMismatchError):
        inner_product(x, CorrVector.constant(d1_plus()))


@pytest.mark.parametrize("name", ["D1", "SWAP2", "DKFLIP_E", "CYCLE3_E"])
def test_cauchy_schwarz_and_module_compatibility(name: str) -> None:
    """Test |<x,y>|^2 <= <x,x><y,y> and <x, y.g> = <x,y> g on random data."""
    graph = GRAPH_FIXTURES[name]()
    rng = np.random.default_rng(11)
    samples = graph.base.sample_points(5)
    for _ in range(20):
        x = CorrVector(graph, random_vector(graph.edges, rng))
        y = CorrVector(graph, random_vector(graph.edges, rng))
        g = CoefFn(graph, random_vector(graph.base, rng))
        xy = inner_product(x, y)
        xx, yy = inner_product(x, x), inner_product(y, y)
        shifted = inner_product(x, act(None, y, g))
        for p in samples:
            assert abs(xy(p)) ** 2 <= abs(xx(p)) * abs(yy(p)) + 1e-12
            assert complex(shifted(p)) == pytest.approx(complex(xy(p) * g(p)))
        bound = corr_norm(x) ** 2 * corr_norm(y) ** 2
        assert max(abs(xy(p)) ** 2 for p in samples) <= bound + 1e-12
