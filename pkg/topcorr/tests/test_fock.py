"""Tests for topcorr.core.fock."""

from fractions import Fraction

import numpy as np
import pytest

from topcorr.core.corr import CoefFn, CorrVector, act, corr_norm
from topcorr.core.equiv.verify import random_vector
from topcorr.core.errors import NotDiscreteError
from topcorr.core.fock import (
    AlgebraElement,
    creation_op,
    element_matrix,
    fock_basis,
    norm_lower_bound,
    parse_element,
    pi_op,
)
from topcorr.core.graph import TopGraph
from topcorr.services.fixtures import GRAPH_FIXTURES, dkflip_e


def test_basis_of_d1_counts_paths(d1: TopGraph) -> None:
    """Test that D1 has 2, 3 and 5 paths in degrees 0, 1 and 2."""
    basis = fock_basis(d1, 2)
    assert basis.dimension == 10
    assert basis.degree_paths(1) == (("e1",), ("e2",), ("e3",))
    assert basis.degree_paths(2) == (
        ("e1", "e1"), ("e1", "e3"), ("e2", "e1"), ("e2", "e3"), ("e3", "e2"),
    )


def test_basis_needs_a_discrete_graph() -> None:
    """Test that PL graphs are rejected."""
    with pytest.raises(NotDiscreteError):
        fock_basis(dkflip_e(), 1)


def test_creation_operator_is_a_partial_isometry(d1: TopGraph) -> None:
    """Test that t(delta_e1) has norm 1 at every depth."""
    element = AlgebraElement.t(CorrVector.delta(d1, "e1"))
    for depth in (1, 2, 3):
        assert norm_lower_bound(element, depth) == pytest.approx(1.0)


def test_covariance_relations_hold_on_matrices(d1: TopGraph) -> None:
    """Test that products of elements match products of matrices."""
    basis = fock_basis(d1, 2)
    f = CoefFn.from_vertex_values(d1, {"a": 2, "b": 3})
    x = CorrVector.from_edge_values(d1, {"e1": 1, "e2": 1j, "e3": -1})
    left = element_matrix(AlgebraElement.pi(f) * AlgebraElement.t(x), basis)
    assert np.allclose(left, pi_op(f, basis) @ creation_op(x, basis))
    right = element_matrix(AlgebraElement.t(x) * AlgebraElement.pi(f), basis)
    assert np.allclose(right, creation_op(x, basis) @ pi_op(f, basis))


def test_parse_element(d1: TopGraph) -> None:
    """Test the element syntax against the matrices it names."""
    basis = fock_basis(d1, 2)
    element = parse_element(d1, "2*pi(a) + (1+1j)*t(e2) + t(e2,e1)")
    expected = (
        2 * pi_op(CoefFn.indicator(d1, "a"), basis)
        + (1 + 1j) * creation_op(CorrVector.delta(d1, "e2"), basis)
        + creation_op(CorrVector.delta(d1, "e2"), basis)
        @ creation_op(CorrVector.delta(d1, "e1"), basis)
    )
    assert np.allclose(element_matrix(element, basis), expected)


@pytest.mark.parametrize("text", ["pi(z)", "t(e9)", "sin(e1)"])
def test_parse_element_rejects_unknown_terms(d1: TopGraph, text: str) -> None:
    """Test that unknown ids and functions are ValueErrors."""
    with pytest.raises(ValueError):  # noqa: PT011
        parse_element(d1, text)


def _random_element(
    graph: TopGraph,
    rng: np.random.Generator,
) -> AlgebraElement:
    def vector() -> CorrVector:
        return CorrVector(graph, random_vector(graph.edges, rng))

    f = CoefFn(graph, random_vector(graph.base, rng))
    return (AlgebraElement.pi(f) + AlgebraElement.t(vector())
            + AlgebraElement.t(vector()) * AlgebraElement.t(vector()))


@pytest.mark.parametrize("name", ["D1", "D1plus", "SWAP2"])
def test_norm_lower_bound_grows_with_depth(name: str) -> None:
    """Test that deeper truncations never lower the norm estimate."""
    graph = GRAPH_FIXTURES[name]()
    rng = np.random.default_rng(13)
    for _ in range(5):
        element = _random_element(graph, rng)
        bounds = [norm_lower_bound(element, depth) for depth in range(1, 5)]
        for lower, upper in zip(bounds, bounds[1:], strict=False):
            assert lower <= upper + 1e-9


@pytest.mark.parametrize("name", ["D1", "D1plus", "SWAP2"])
def test_creation_operator_is_bounded_by_the_vector(name: str) -> None:
    """Test that the truncated t(x) has norm at most ||x||."""
    graph = GRAPH_FIXTURES[name]()
    rng = np.random.default_rng(17)
    basis = fock_basis(graph, 3)
    for _ in range(10):
        x = CorrVector(graph, random_vector(graph.edges, rng))
        norm = float(np.linalg.norm(creation_op(x, basis), 2))
        assert norm <= corr_norm(x) + 1e-9


def _dyadic(rng: np.random.Generator) -> Fraction:
    return Fraction(int(rng.integers(-64, 65)), 64)


@pytest.mark.parametrize("name", ["D1", "SWAP2"])
@pytest.mark.parametrize("depth", [1, 2, 3, 4])
def test_covariance_relations_are_exact(name: str, depth: int) -> None:
    """Test pi(f) t(x) = t(f.x) and t(x) pi(g) = t(x.g) entrywise."""
    graph = GRAPH_FIXTURES[name]()
    basis = fock_basis(graph, depth)
    rng = np.random.default_rng(depth)
    for _ in range(100):
        f = CoefFn.from_vertex_values(
            graph, {v: _dyadic(rng) for v in graph.base.vertices})
        g = CoefFn.from_vertex_values(
            graph, {v: _dyadic(rng) for v in graph.base.vertices})
        x = CorrVector.from_edge_values(graph, {
            e: complex(_dyadic(rng), _dyadic(rng))
            for e in graph.edges.vertices
        })
        t_x = creation_op(x, basis)
        assert np.array_equal(creation_op(act(f, x, None), basis),
                              pi_op(f, basis) @ t_x)
        assert np.array_equal(creation_op(act(None, x, g), basis),
                              t_x @ pi_op(g, basis))
