"""Characters of the tensor algebra over a base point."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Any

from topcorr.core.constants import BALL_TOLERANCE
from topcorr.core.corr import CoefFn, CorrVector
from topcorr.core.errors import BumpError, PointError
from topcorr.core.graph import EdgeFiber, TopGraph, loops_at, require_same_graph
from topcorr.core.space.complex import ONE, ZERO, Point
from topcorr.core.space.field import ScalarField
from topcorr.core.space.region import Interval, Region

if TYPE_CHECKING:
    from collections.abc import Sequence

    from topcorr.core.fock import AlgebraElement
    from topcorr.core.space.knots import KnotSet


def fiber_dimension(graph: TopGraph, v: Point) -> tuple[int, EdgeFiber]:
    """
    Dimension of the character ball over ``v`` and its loop fiber.

    :param graph: The graph.
    :type graph: TopGraph
    :param v: Base point.
    :type v: Point
    :return: ``n = |E1_v|`` and the ordered loops.
    :rtype: tuple[int, EdgeFiber]
    """
    loops = loops_at(graph, v)
    return loops.n, loops


@dataclass(frozen=True, eq=False)
class CharacterPoint:
    """The character over ``v`` with ball coordinates ``z``."""

    graph: TopGraph
    v: Point
    z: tuple[complex, ...]
    loops: tuple[Point, ...]

    def __post_init__(self) -> None:
        if len(self.z) != len(self.loops):
            msg = (
                f"character over {self.v} needs {len(self.loops)} "
                f"coordinates, got {len(self.z)}"
            )
            raise PointError(msg)
        norm = math.sqrt(sum(abs(c) ** 2 for c in self.z))
        if norm > 1 + BALL_TOLERANCE:
            msg = f"coordinates have norm {norm} > 1"
            raise PointError(msg)

    @classmethod
    def at(
        cls,
        graph: TopGraph,
        v: Point,
        z: Sequence[complex] | None = None,
    ) -> CharacterPoint:
        """
        Character over ``v``; ``z`` defaults to the centre of the ball.

        :param graph: The graph.
        :type graph: TopGraph
        :param v: Base point.
        :type v: Point
        :param z: Ball coordinates in loop order.
        :type z: Sequence[complex] | None
        :return: The character.
        :rtype: CharacterPoint
        """
        n, loops = fiber_dimension(graph, v)
        coords = tuple(complex(c) for c in z) if z is not None else (
            (0j,) * n
        )
        return cls(graph=graph, v=v, z=coords, loops=loops.edges)

    def t_z(self, x: CorrVector) -> complex:
        """``sum_i z_i x(e_i)``."""
        return sum(
            (c * complex(x(e)) for c, e in zip(self.z, self.loops,
                                               strict=True)),
            0j,
        )


def expectation(element: AlgebraElement) -> CoefFn:
    """The degree-0 part of an algebra element."""
    return element.expectation()


def eval_character(theta: CharacterPoint, element: AlgebraElement) -> complex:
    """
    Value of the character on a polynomial element.

    :param theta: The character.
    :type theta: CharacterPoint
    :param element: The element.
    :type element: AlgebraElement
    :raises GraphMismatchError: If they live on different graphs.
    :return: ``x_0(v) + sum over terms of prod_k t_z(x_k)``.
    :rtype: complex
    """
    require_same_graph(theta.graph, element.graph)
    value = complex(expectation(element)(theta.v))
    for u in element.tensors:
        for term in u.terms:
            product = complex(term.coefficient)
            for factor in term.factors:
                product *= theta.t_z(factor)
            value += product
    return value


@dataclass(frozen=True, eq=False)
class BumpFamily:
    """Contractions ``t_i`` equal to 1 near the loop ``e_i``."""

    graph: TopGraph
    v: Point
    loops: tuple[Point, ...]
    inner: tuple[Region, ...]
    outer: tuple[Region, ...]
    bumps: tuple[CorrVector, ...]


def _collars(
    knots: KnotSet,
    e: Point,
    fraction: Fraction,
) -> dict[int, list[tuple[Fraction, Fraction]]]:
    """Per segment, ``(t at e, t at the collar edge)`` on each adjacent gap."""
    out: dict[int, list[tuple[Fraction, Fraction]]] = {}
    if e.vertex is not None:
        for seg, end in knots.complex.incident(e.vertex):
            ts = knots.knots(seg)
            near, far = (ts[0], ts[1]) if end == 0 else (ts[-1], ts[-2])
            out.setdefault(seg, []).append(
                (near, near + (far - near) * fraction),
            )
        return out
    assert e.segment is not None
    assert e.t is not None
    ts = knots.knots(e.segment)
    k = ts.index(e.t)
    out[e.segment] = [
        (e.t, e.t + (ts[k - 1] - e.t) * fraction),
        (e.t, e.t + (ts[k + 1] - e.t) * fraction),
    ]
    return out


def _collar_region(knots: KnotSet, e: Point, fraction: Fraction) -> Region:
    parts: dict[int, list[Interval]] = {}
    for seg, ends in _collars(knots, e, fraction).items():
        for near, edge in ends:
            lo, hi = sorted((near, edge))
            parts.setdefault(seg, []).append(
                Interval(lo, hi, lo == near, hi == near),
            )
    vertices = [e.vertex] if e.vertex is not None else []
    return Region.from_parts(knots.complex, vertices, parts)


def make_bumps(graph: TopGraph, v: Point) -> BumpFamily:
    """
    Canonical PL bumps around the loops over ``v``.

    Each loop is an edge knot of the canonical refinement; its bump is 1
    on the first quarter of every adjacent edge gap and falls linearly
    to 0 at the half.  ``V_i`` is the open quarter collar and ``U_i`` the
    open half collar; the collars of distinct loops are disjoint.

    :param graph: The graph.
    :type graph: TopGraph
    :param v: Base point.
    :type v: Point
    :return: The family, empty when there are no loops.
    :rtype: BumpFamily
    """
    _, fiber = fiber_dimension(graph, v)
    knots = graph.knots([v]).edges
    quarter, half = Fraction(1, 4), Fraction(1, 2)
    inner, outer, bumps = [], [], []
    for e in fiber.edges:
        interior: dict[int, dict[Fraction, Any]] = {}
        for seg, ends in _collars(knots, e, quarter).items():
            for near, edge in ends:
                interior.setdefault(seg, {})[edge] = ONE
                if ZERO < near < ONE:
                    interior[seg][near] = ONE
        for seg, ends in _collars(knots, e, half).items():
            for _, edge in ends:
                interior.setdefault(seg, {})[edge] = ZERO
        vertex_values = {e.vertex: ONE} if e.vertex is not None else {}
        field = ScalarField.piecewise_linear(graph.edges, vertex_values,
                                             interior)
        bumps.append(CorrVector(graph, field))
        inner.append(_collar_region(knots, e, quarter))
        outer.append(_collar_region(knots, e, half))
    return BumpFamily(graph=graph, v=v, loops=fiber.edges,
                      inner=tuple(inner), outer=tuple(outer),
                      bumps=tuple(bumps))


def character_coordinates(
    graph: TopGraph,
    v: Point,
    bumps: BumpFamily,
    theta: CharacterPoint,
) -> tuple[complex, ...]:
    """
    Ball coordinates ``(theta(t_1), ..., theta(t_n))`` of a character.

    :param graph: The graph.
    :type graph: TopGraph
    :param v: Base point.
    :type v: Point
    :param bumps: Bumps built over ``v``.
    :type bumps: BumpFamily
    :param theta: Character over ``v``.
    :type theta: CharacterPoint
    :raises BumpError: If the bumps or character sit over another point.
    :return: The coordinates.
    :rtype: tuple[complex, ...]
    """
    require_same_graph(graph, bumps.graph)
    require_same_graph(graph, theta.graph)
    if bumps.v != v or theta.v != v or bumps.loops != theta.loops:
        msg = f"bump family and character do not both sit over {v}"
        raise BumpError(msg)
    return tuple(theta.t_z(bump) for bump in bumps.bumps)
