"""The correspondence X(E): module actions, inner products and tensors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

from topcorr.core.errors import DegreeMismatchError, GraphMismatchError
from topcorr.core.graph import TopGraph, require_same_graph
from topcorr.core.space.complex import ONE, ZERO, Point, Scalar
from topcorr.core.space.field import ScalarField

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping


@dataclass(frozen=True, eq=False)
class CoefFn:
    """A coefficient ``f`` in ``C(E0)``."""

    graph: TopGraph
    field: ScalarField

    def __post_init__(self) -> None:
        if self.field.complex != self.graph.base:
            msg = "coefficient field does not live on the base space"
            raise GraphMismatchError(msg)

    @classmethod
    def constant(cls, graph: TopGraph, value: Scalar = ONE) -> CoefFn:
        return cls(graph, ScalarField.constant(graph.base, value))

    @classmethod
    def zero(cls, graph: TopGraph) -> CoefFn:
        return cls.constant(graph, ZERO)

    @classmethod
    def from_vertex_values(
        cls,
        graph: TopGraph,
        values: Mapping[str, Scalar],
    ) -> CoefFn:
        """Interpolate vertex values; missing vertices get 0."""
        return cls(graph, ScalarField.from_vertex_values(graph.base, values))

    @classmethod
    def indicator(cls, graph: TopGraph, vertex: str) -> CoefFn:
        """1 at ``vertex`` and 0 at every other vertex."""
        return cls.from_vertex_values(graph, {vertex: ONE})

    def __call__(self, point: Point) -> Any:
        return self.field(point)

    def __add__(self, other: CoefFn) -> CoefFn:
        require_same_graph(self.graph, other.graph)
        return CoefFn(self.graph, self.field + other.field)

    def __sub__(self, other: CoefFn) -> CoefFn:
        require_same_graph(self.graph, other.graph)
        return CoefFn(self.graph, self.field - other.field)

    def __mul__(self, other: CoefFn) -> CoefFn:
        require_same_graph(self.graph, other.graph)
        return CoefFn(self.graph, self.field * other.field)

    def scale(self, c: Scalar) -> CoefFn:
        return CoefFn(self.graph, self.field.scale(c))

    def conjugate(self) -> CoefFn:
        return CoefFn(self.graph, self.field.conjugate())

    def sup_abs(self) -> float:
        return self.field.sup_abs()


@dataclass(frozen=True, eq=False)
class CorrVector:
    """A vector ``x`` of the dense PL subspace of ``X(E)``."""

    graph: TopGraph
    field: ScalarField

    def __post_init__(self) -> None:
        if self.field.complex != self.graph.edges:
            msg = "vector field does not live on the edge space"
            raise GraphMismatchError(msg)

    @classmethod
    def zero(cls, graph: TopGraph) -> CorrVector:
        return cls(graph, ScalarField.zero(graph.edges))

    @classmethod
    def constant(cls, graph: TopGraph, value: Scalar = ONE) -> CorrVector:
        return cls(graph, ScalarField.constant(graph.edges, value))

    @classmethod
    def from_edge_values(
        cls,
        graph: TopGraph,
        values: Mapping[str, Scalar],
    ) -> CorrVector:
        """Interpolate values at edge-space vertices; missing ones get 0."""
        return cls(graph, ScalarField.from_vertex_values(graph.edges, values))

    @classmethod
    def delta(cls, graph: TopGraph, edge: str) -> CorrVector:
        """Point mass at an edge-space vertex (discrete graphs)."""
        return cls.from_edge_values(graph, {edge: ONE})

    def __call__(self, point: Point) -> Any:
        return self.field(point)

    def __add__(self, other: CorrVector) -> CorrVector:
        require_same_graph(self.graph, other.graph)
        return CorrVector(self.graph, self.field + other.field)

    def __sub__(self, other: CorrVector) -> CorrVector:
        require_same_graph(self.graph, other.graph)
        return CorrVector(self.graph, self.field - other.field)

    def scale(self, c: Scalar) -> CorrVector:
        return CorrVector(self.graph, self.field.scale(c))


def act(
    f: CoefFn | None,
    x: CorrVector,
    g: CoefFn | None = None,
) -> CorrVector:
    """
    Bimodule action ``(f.x.g)(e) = f(r(e)) x(e) g(s(e))``.

    :param f: Left coefficient, or None for 1.
    :type f: CoefFn | None
    :param x: The vector.
    :type x: CorrVector
    :param g: Right coefficient, or None for 1.
    :type g: CoefFn | None
    :raises GraphMismatchError: If the operands live on different graphs.
    :return: The product vector.
    :rtype: CorrVector
    """
    graph = x.graph
    field = x.field
    if f is not None:
        require_same_graph(f.graph, graph)
        field = f.field.pullback(graph.range_map) * field
    if g is not None:
        require_same_graph(g.graph, graph)
        field = field * g.field.pullback(graph.source_map)
    return CorrVector(graph, field)


def inner_product(x: CorrVector, y: CorrVector) -> CoefFn:
    """
    ``<x, y>(v) = sum over s(e) = v of conj(x(e)) y(e)``.

    :param x: Left vector.
    :type x: CorrVector
    :param y: Right vector.
    :type y: CorrVector
    :raises GraphMismatchError: If the vectors live on different graphs.
    :return: The inner product in ``C(E0)``.
    :rtype: CoefFn
    """
    require_same_graph(x.graph, y.graph)
    product = x.field.conjugate() * y.field
    return CoefFn(x.graph, product.fiber_sum(x.graph.source_map))


def corr_norm(x: CorrVector) -> float:
    """``sup_v <x, x>(v) ** 1/2``, maximized exactly over every piece."""
    return math.sqrt(inner_product(x, x).sup_abs())


@dataclass(frozen=True, eq=False)
class ElementaryTensor:
    """``coefficient * x_1 (x) ... (x) x_n``."""

    coefficient: Scalar
    factors: tuple[CorrVector, ...]


@dataclass(frozen=True, eq=False)
class TensorVector:
    """A degree-homogeneous combination of elementary tensors."""

    graph: TopGraph
    degree: int
    terms: tuple[ElementaryTensor, ...] = ()

    def __post_init__(self) -> None:
        for term in self.terms:
            if len(term.factors) != self.degree:
                msg = (
                    f"term of degree {len(term.factors)} in a tensor of "
                    f"degree {self.degree}"
                )
                raise DegreeMismatchError(msg)
            for factor in term.factors:
                require_same_graph(factor.graph, self.graph)

    @classmethod
    def elementary(
        cls,
        factors: Iterable[CorrVector],
        coefficient: Scalar = ONE,
    ) -> TensorVector:
        """
        A single elementary tensor.

        :param factors: At least one factor, all on one graph.
        :type factors: Iterable[CorrVector]
        :param coefficient: Scalar coefficient.
        :type coefficient: Scalar
        :return: The tensor.
        :rtype: TensorVector
        """
        items = tuple(factors)
        if not items:
            msg = "a tensor needs at least one factor"
            raise DegreeMismatchError(msg)
        return cls(items[0].graph, len(items),
                   (ElementaryTensor(coefficient, items),))

    def __add__(self, other: TensorVector) -> TensorVector:
        require_same_graph(self.graph, other.graph)
        if self.degree != other.degree:
            msg = f"cannot add degrees {self.degree} and {other.degree}"
            raise DegreeMismatchError(msg)
        return TensorVector(self.graph, self.degree,
                            self.terms + other.terms)

    def scale(self, c: Scalar) -> TensorVector:
        return TensorVector(
            self.graph, self.degree,
            tuple(ElementaryTensor(c * t.coefficient, t.factors)
                  for t in self.terms),
        )

    def left_act(self, f: CoefFn) -> TensorVector:
        """``f . (x_1 (x) ...) = (f . x_1) (x) ...``."""
        return TensorVector(
            self.graph, self.degree,
            tuple(
                ElementaryTensor(t.coefficient,
                                 (act(f, t.factors[0]), *t.factors[1:]))
                for t in self.terms
            ),
        )

    def right_act(self, g: CoefFn) -> TensorVector:
        """``(... (x) x_n) . g = ... (x) (x_n . g)``."""
        return TensorVector(
            self.graph, self.degree,
            tuple(
                ElementaryTensor(t.coefficient,
                                 (*t.factors[:-1], act(None, t.factors[-1], g)))
                for t in self.terms
            ),
        )

    def tensor(self, other: TensorVector) -> TensorVector:
        """The tensor product, degree ``n + m``."""
        require_same_graph(self.graph, other.graph)
        return TensorVector(
            self.graph, self.degree + other.degree,
            tuple(
                ElementaryTensor(a.coefficient * b.coefficient,
                                 a.factors + b.factors)
                for a in self.terms for b in other.terms
            ),
        )


def _elementary_inner(
    xs: tuple[CorrVector, ...],
    ys: tuple[CorrVector, ...],
) -> CoefFn:
    value = inner_product(xs[0], ys[0])
    if len(xs) == 1:
        return value
    return _elementary_inner(xs[1:], (act(value, ys[1]), *ys[2:]))


def tensor_inner_product(u: TensorVector, w: TensorVector) -> CoefFn:
    """
    Inner product on ``X(E)^n``.

    Uses ``<x_1 (x) x', y_1 (x) y'> = <x', <x_1, y_1> . y'>`` recursively.

    :param u: Left tensor.
    :type u: TensorVector
    :param w: Right tensor of the same degree.
    :type w: TensorVector
    :raises DegreeMismatchError: If the degrees differ.
    :return: The inner product in ``C(E0)``.
    :rtype: CoefFn
    """
    require_same_graph(u.graph, w.graph)
    if u.degree != w.degree:
        msg = f"degrees {u.degree} and {w.degree} differ"
        raise DegreeMismatchError(msg)
    total = CoefFn.zero(u.graph)
    for a in u.terms:
        for b in w.terms:
            weight = a.coefficient.conjugate() * b.coefficient
            total = total + _elementary_inner(a.factors, b.factors).scale(
                weight,
            )
    return total
