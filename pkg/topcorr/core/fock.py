"""Truncated Fock space matrices and the polynomial part of the tensor algebra."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np

from topcorr.core.constants import MAX_FOCK_DIMENSION
from topcorr.core.corr import CoefFn, CorrVector, TensorVector
from topcorr.core.errors import BudgetExceededError, NotDiscreteError
from topcorr.core.graph import TopGraph, require_same_graph
from topcorr.core.space.complex import ONE, Point, Scalar

if TYPE_CHECKING:
    from collections.abc import Iterable

_LOGGER = logging.getLogger(__name__)

Path = tuple[str, ...]
"""A basis element: ``(vertex,)`` in degree 0, edge ids otherwise."""


def _require_discrete(graph: TopGraph) -> None:
    if not graph.is_discrete:
        msg = f"graph {graph.name!r} is not discrete"
        raise NotDiscreteError(msg)


def _vertex_of(point: Point) -> str:
    assert point.vertex is not None
    return point.vertex


@dataclass(frozen=True)
class PathBasis:
    """Paths of length at most ``depth``, degree-major then lexicographic."""

    graph: TopGraph = field(compare=False)
    depth: int
    paths: tuple[tuple[int, Path], ...]

    @cached_property
    def index(self) -> dict[tuple[int, Path], int]:
        return {p: k for k, p in enumerate(self.paths)}

    @property
    def dimension(self) -> int:
        return len(self.paths)

    def degree_paths(self, degree: int) -> tuple[Path, ...]:
        return tuple(p for d, p in self.paths if d == degree)

    def range_vertex(self, degree: int, path: Path) -> str:
        """``r`` of the first edge, or the vertex itself in degree 0."""
        if degree == 0:
            return path[0]
        return _vertex_of(self.graph.range_map(Point.at(path[0])))

    def source_vertex(self, degree: int, path: Path) -> str:
        """``s`` of the last edge, or the vertex itself in degree 0."""
        if degree == 0:
            return path[0]
        return _vertex_of(self.graph.source_map(Point.at(path[-1])))


def fock_basis(graph: TopGraph, depth: int) -> PathBasis:
    """
    Enumerate paths ``(e_1, ..., e_n)`` with ``s(e_k) = r(e_k+1)``.

    :param graph: A discrete graph.
    :type graph: TopGraph
    :param depth: Truncation depth ``N >= 0``.
    :type depth: int
    :raises NotDiscreteError: If the graph has segments.
    :raises BudgetExceededError: If the basis grows past the budget.
    :return: The basis.
    :rtype: PathBasis
    """
    _require_discrete(graph)
    if depth < 0:
        msg = f"depth must be >= 0, got {depth}"
        raise ValueError(msg)
    r, s = graph.range_map, graph.source_map
    edges = sorted(graph.edges.vertices)
    paths: list[tuple[int, Path]] = [(0, (v,)) for v in
                                     sorted(graph.base.vertices)]
    level: list[Path] = [(e,) for e in edges]
    for degree in range(1, depth + 1):
        paths.extend((degree, p) for p in level)
        if len(paths) > MAX_FOCK_DIMENSION:
            msg = (
                f"Fock basis exceeds {MAX_FOCK_DIMENSION} paths at degree "
                f"{degree}"
            )
            raise BudgetExceededError(msg)
        level = sorted(
            (*p, e) for p in level for e in edges
            if r(Point.at(e)) == s(Point.at(p[-1]))
        )
    _LOGGER.debug("Fock basis of depth %d: %d paths", depth, len(paths))
    return PathBasis(graph=graph, depth=depth, paths=tuple(paths))


def pi_op(f: CoefFn, basis: PathBasis) -> np.ndarray:
    """
    Diagonal matrix of ``pi(f)``: ``f(r(e_1))`` on each path.

    :param f: Coefficient.
    :type f: CoefFn
    :param basis: The path basis.
    :type basis: PathBasis
    :return: The matrix.
    :rtype: numpy.ndarray
    """
    require_same_graph(f.graph, basis.graph)
    diag = [complex(f(Point.at(basis.range_vertex(d, p))))
            for d, p in basis.paths]
    return np.diag(np.asarray(diag, dtype=complex))


def creation_op(x: CorrVector, basis: PathBasis) -> np.ndarray:
    """
    Matrix of ``t(x)``: the path ``mu`` goes to ``e mu`` with weight ``x(e)``.

    The top degree maps to zero.

    :param x: The vector.
    :type x: CorrVector
    :param basis: The path basis.
    :type basis: PathBasis
    :return: The matrix.
    :rtype: numpy.ndarray
    """
    graph = basis.graph
    require_same_graph(x.graph, graph)
    s = graph.source_map
    out = np.zeros((basis.dimension, basis.dimension), dtype=complex)
    edges = sorted(graph.edges.vertices)
    for col, (degree, path) in enumerate(basis.paths):
        if degree == basis.depth:
            continue
        head = basis.range_vertex(degree, path)
        for e in edges:
            if _vertex_of(s(Point.at(e))) != head:
                continue
            target = (e,) if degree == 0 else (e, *path)
            out[basis.index[(degree + 1, target)], col] = complex(
                x(Point.at(e)),
            )
    return out


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """A finite sum ``pi(x_0) + sum_n t^n(x_n)``."""

    graph: TopGraph
    coefficient: CoefFn | None = None
    tensors: tuple[TensorVector, ...] = ()

    @classmethod
    def zero(cls, graph: TopGraph) -> AlgebraElement:
        return cls(graph)

    @classmethod
    def pi(cls, f: CoefFn) -> AlgebraElement:
        return cls(f.graph, coefficient=f)

    @classmethod
    def t(cls, x: CorrVector) -> AlgebraElement:
        return cls(x.graph, tensors=(TensorVector.elementary([x]),))

    @classmethod
    def tn(cls, u: TensorVector) -> AlgebraElement:
        return cls(u.graph, tensors=(u,))

    def degrees(self) -> dict[int, TensorVector]:
        """Tensor parts grouped by degree."""
        out: dict[int, TensorVector] = {}
        for u in self.tensors:
            out[u.degree] = out[u.degree] + u if u.degree in out else u
        return out

    def expectation(self) -> CoefFn:
        return self.coefficient or CoefFn.zero(self.graph)

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        require_same_graph(self.graph, other.graph)
        if self.coefficient is None or other.coefficient is None:
            coefficient = self.coefficient or other.coefficient
        else:
            coefficient = self.coefficient + other.coefficient
        return AlgebraElement(self.graph, coefficient,
                              self.tensors + other.tensors)

    def scale(self, c: Scalar) -> AlgebraElement:
        return AlgebraElement(
            self.graph,
            None if self.coefficient is None else self.coefficient.scale(c),
            tuple(u.scale(c) for u in self.tensors),
        )

    def __mul__(self, other: AlgebraElement) -> AlgebraElement:
        """
        Product through the covariance relations.

        ``pi(f) t^n(u) = t^n(f.u)``, ``t^n(u) pi(g) = t^n(u.g)`` and
        ``t^n(u) t^m(w) = t^(n+m)(u (x) w)``.
        """
        require_same_graph(self.graph, other.graph)
        f, g = self.coefficient, other.coefficient
        coefficient = f * g if f is not None and g is not None else None
        tensors: list[TensorVector] = []
        if g is not None:
            tensors.extend(u.right_act(g) for u in self.tensors)
        if f is not None:
            tensors.extend(w.left_act(f) for w in other.tensors)
        tensors.extend(u.tensor(w) for u in self.tensors
                       for w in other.tensors)
        return AlgebraElement(self.graph, coefficient, tuple(tensors))


def tensor_matrix(u: TensorVector, basis: PathBasis) -> np.ndarray:
    """``t^n(x_1 (x) ... (x) x_n) = t(x_1) ... t(x_n)``, summed over terms."""
    out = np.zeros((basis.dimension, basis.dimension), dtype=complex)
    for term in u.terms:
        product = np.eye(basis.dimension, dtype=complex)
        for factor in term.factors:
            product = product @ creation_op(factor, basis)
        out += complex(term.coefficient) * product
    return out


def element_matrix(element: AlgebraElement, basis: PathBasis) -> np.ndarray:
    """
    Matrix of an algebra element on the truncated Fock space.

    :param element: The element.
    :type element: AlgebraElement
    :param basis: The path basis.
    :type basis: PathBasis
    :return: The matrix.
    :rtype: numpy.ndarray
    """
    require_same_graph(element.graph, basis.graph)
    out = np.zeros((basis.dimension, basis.dimension), dtype=complex)
    if element.coefficient is not None:
        out += pi_op(element.coefficient, basis)
    for u in element.tensors:
        out += tensor_matrix(u, basis)
    return out


def norm_lower_bound(element: AlgebraElement, depth: int) -> float:
    """
    Operator 2-norm of the truncated Fock matrix.

    :param element: The element.
    :type element: AlgebraElement
    :param depth: Truncation depth.
    :type depth: int
    :return: A lower bound for the norm in the tensor algebra.
    :rtype: float
    """
    basis = fock_basis(element.graph, depth)
    return float(np.linalg.norm(element_matrix(element, basis), 2))


def parse_element(graph: TopGraph, text: str) -> AlgebraElement:
    """
    Parse ``"2*pi(a) + (1+1j)*t(e2) + t(e2,e1)"``.

    :param graph: A discrete graph.
    :type graph: TopGraph
    :param text: ``+``-separated terms: ``pi(v)``, ``t(e)`` or
        ``t(e_1,...,e_n)``, each optionally prefixed by ``coefficient*``.
    :type text: str
    :raises ValueError: On malformed terms or unknown ids.
    :return: The element.
    :rtype: AlgebraElement
    """
    _require_discrete(graph)
    total = AlgebraElement.zero(graph)
    for raw in _split_terms(text):
        coefficient: Scalar = ONE
        body = raw
        if "*" in raw:
            head, body = raw.rsplit("*", 1)
            coefficient = complex(head.strip().replace(" ", ""))
        body = body.strip()
        if body.startswith("pi(") and body.endswith(")"):
            vertex = body[3:-1].strip()
            if not graph.base.has_vertex(vertex):
                msg = f"unknown base vertex {vertex!r}"
                raise ValueError(msg)
            term = AlgebraElement.pi(CoefFn.indicator(graph, vertex))
        elif body.startswith("t(") and body.endswith(")"):
            ids = [e.strip() for e in body[2:-1].split(",")]
            unknown = [e for e in ids if not graph.edges.has_vertex(e)]
            if unknown:
                msg = f"unknown edges {unknown}"
                raise ValueError(msg)
            term = AlgebraElement.tn(
                TensorVector.elementary(CorrVector.delta(graph, e)
                                        for e in ids),
            )
        else:
            msg = f"cannot parse term {raw!r}"
            raise ValueError(msg)
        total = total + term.scale(coefficient)
    return total


def _split_terms(text: str) -> Iterable[str]:
    """Split on ``+`` outside parentheses."""
    depth = 0
    current: list[str] = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "+" and depth == 0 and "".join(current).strip():
            yield "".join(current)
            current = []
            continue
        current.append(ch)
    if "".join(current).strip():
        yield "".join(current)
