"""Topological graphs ``E = (E0, E1, r, s)`` over finite 1-complexes."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from topcorr.core.constants import EDGE_EQUIVALENCE_SHRINKS
from topcorr.core.errors import GraphMismatchError, InvalidGraphError
from topcorr.core.space.complex import Complex1, Point, Segment
from topcorr.core.space.knots import GraphKnots
from topcorr.core.space.plmap import Piece, PLMap, SegmentImage

if TYPE_CHECKING:
    from collections.abc import Sequence

    from topcorr.core.space.region import Region

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    """Verdict of one named check, with a witness on failure."""

    name: str
    ok: bool
    witness: str | None = None
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    """Per-axiom verdicts of a graph."""

    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.ok)


@dataclass(frozen=True)
class EdgeFiber:
    """Edges over a vertex pair: ``r(e) = v`` and ``s(e) = w``."""

    v: Point
    w: Point
    edges: tuple[Point, ...]

    @property
    def n(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class TopGraph:
    """A compact topological graph."""

    base: Complex1
    edges: Complex1
    range_map: PLMap
    source_map: PLMap
    name: str = ""

    @property
    def r(self) -> PLMap:
        return self.range_map

    @property
    def s(self) -> PLMap:
        return self.source_map

    @property
    def is_discrete(self) -> bool:
        return self.base.is_discrete and self.edges.is_discrete

    def validate(self) -> ValidationReport:
        """
        Check the graph axioms.

        :return: One verdict per axiom: map domains, ``s`` a local
            homeomorphism, ``r`` proper, compactness.
        :rtype: ValidationReport
        """
        checks = []
        for label, m in (("range_map", self.range_map),
                         ("source_map", self.source_map)):
            ok = m.source == self.edges and m.target == self.base
            checks.append(
                CheckResult(
                    name=f"{label}_domain",
                    ok=ok,
                    detail="" if ok else f"{label} is not a map E1 -> E0",
                ),
            )
        if all(c.ok for c in checks):
            report = self.source_map.local_homeomorphism_report()
            checks.append(
                CheckResult(
                    name="source_local_homeomorphism",
                    ok=report.ok,
                    witness=(str(report.counterexample)
                             if report.counterexample else None),
                    detail=report.reason
                    or f"{report.checked_points} critical points checked",
                ),
            )
            checks.append(
                CheckResult(
                    name="range_proper",
                    ok=self.range_map.is_proper(),
                    detail="compact edge space",
                ),
            )
        checks.append(
            CheckResult(name="compact", ok=True,
                        detail="finite complexes are compact"),
        )
        result = ValidationReport(checks=tuple(checks))
        _LOGGER.debug("validated graph %r: ok=%s", self.name, result.ok)
        return result

    def require_valid(self) -> TopGraph:
        """
        Return the graph, or raise if it fails validation.

        :raises InvalidGraphError: Naming the first failed check.
        :return: This graph.
        :rtype: TopGraph
        """
        failures = self.validate().failures()
        if failures:
            first = failures[0]
            msg = f"graph {self.name!r} fails {first.name}: {first.detail}"
            if first.witness:
                msg += f" at {first.witness}"
            raise InvalidGraphError(msg)
        return self

    def knots(self, extra: Sequence[Point] = ()) -> GraphKnots:
        return GraphKnots.build(self.source_map, self.range_map, extra)


def require_same_graph(left: TopGraph, right: TopGraph) -> None:
    """
    Raise unless two operands live on the same graph.

    :raises GraphMismatchError: If they differ.
    """
    if left is not right and left != right:
        msg = f"graphs {left.name!r} and {right.name!r} differ"
        raise GraphMismatchError(msg)


def loops_at(graph: TopGraph, v: Point) -> EdgeFiber:
    """
    The loop fiber ``{e : r(e) = v = s(e)}``.

    :param graph: The graph.
    :type graph: TopGraph
    :param v: Base point.
    :type v: Point
    :return: The fiber, ordered by edge-space position.
    :rtype: EdgeFiber
    """
    return edges_between(graph, v, v)


def edges_between(graph: TopGraph, v: Point, w: Point) -> EdgeFiber:
    """
    The fiber ``r^-1(v) & s^-1(w)``.

    :param graph: The graph.
    :type graph: TopGraph
    :param v: Range point.
    :type v: Point
    :param w: Source point.
    :type w: Point
    :return: The fiber, ordered by edge-space position.
    :rtype: EdgeFiber
    """
    graph.base.require(v)
    edges = tuple(e for e in graph.source_map.preimage(w)
                  if graph.range_map(e) == v)
    return EdgeFiber(v=v, w=w, edges=edges)


def copy_vertex(k: int, vertex: str) -> str:
    """Name of vertex ``vertex`` in copy ``k`` of the edge space."""
    return f"{k}:{vertex}"


def copy_point(space: Complex1, k: int, point: Point) -> Point:
    """
    The point ``(k, point)`` of ``{1..n} x X``.

    :param space: The base ``X``.
    :type space: Complex1
    :param k: Copy index, starting at 1.
    :type k: int
    :param point: Point of ``X``.
    :type point: Point
    :return: The edge point.
    :rtype: Point
    """
    if point.vertex is not None:
        return Point.at(copy_vertex(k, point.vertex))
    assert point.segment is not None
    assert point.t is not None
    return Point.on((k - 1) * len(space.segments) + point.segment, point.t)


def from_dynamical_system(
    space: Complex1,
    maps: Sequence[PLMap],
    name: str = "",
) -> TopGraph:
    """
    Graph of a multivariable dynamical system.

    ``E0 = X``, ``E1 = {1..n} x X``, ``s`` the projection and ``r``
    equal to ``sigma_k`` on copy ``k``.

    :param space: The space ``X``.
    :type space: Complex1
    :param maps: Self-maps ``sigma_1 .. sigma_n`` of ``X``.
    :type maps: Sequence[PLMap]
    :param name: Graph name.
    :type name: str
    :raises GraphMismatchError: If a map is not a self-map of ``X``.
    :return: The validated graph.
    :rtype: TopGraph
    """
    for k, sigma in enumerate(maps, start=1):
        if sigma.source != space or sigma.target != space:
            msg = f"map {k} is not a self-map of the base space"
            raise GraphMismatchError(msg)
    vertices = [copy_vertex(k, v)
                for k in range(1, len(maps) + 1) for v in space.vertices]
    segments = [
        Segment(copy_vertex(k, seg.start), copy_vertex(k, seg.end))
        for k in range(1, len(maps) + 1) for seg in space.segments
    ]
    edges = Complex1(vertices=tuple(vertices), segments=tuple(segments))
    projection = PLMap(
        source=edges,
        target=space,
        vertex_images={
            copy_vertex(k, v): Point.at(v)
            for k in range(1, len(maps) + 1) for v in space.vertices
        },
        segment_images=tuple(
            SegmentImage.single(Piece.affine(j, 0, 1))
            for _ in maps for j in range(len(space.segments))
        ),
    )
    union = PLMap(
        source=edges,
        target=space,
        vertex_images={
            copy_vertex(k, v): sigma.vertex_images[v]
            for k, sigma in enumerate(maps, start=1) for v in space.vertices
        },
        segment_images=tuple(
            image for sigma in maps for image in sigma.segment_images
        ),
    )
    graph = TopGraph(base=space, edges=edges, range_map=union,
                     source_map=projection, name=name)
    return graph.require_valid()


@dataclass(frozen=True)
class EdgeEquivalence:
    """Verdict of the edge equivalence test."""

    equivalent: bool
    witness: Point | None = None
    neighbourhoods: tuple[Region, Region] | None = None
    detail: str = ""


def edge_equivalent(graph: TopGraph, e: Point, e2: Point) -> EdgeEquivalence:
    """
    Decide whether two edges are equivalent.

    ``s`` is inverted on the evenly covered stars of ``e`` and ``e2``;
    ``r`` composed with either inverse is affine on every gap of the
    base star, so comparing it at a shrinking sequence of probes on each
    adjacent gap is exact.

    :param graph: The graph.
    :type graph: TopGraph
    :param e: First edge point.
    :type e: Point
    :param e2: Second edge point.
    :type e2: Point
    :return: The verdict, with a base-point witness on disagreement.
    :rtype: EdgeEquivalence
    """
    s, r = graph.source_map, graph.range_map
    graph.edges.require(e)
    graph.edges.require(e2)
    u = s(e)
    if s(e2) != u:
        return EdgeEquivalence(False, witness=u,
                               detail="source images differ")
    if r(e) != r(e2):
        return EdgeEquivalence(False, witness=u,
                               detail="range images differ")
    knots = GraphKnots.build(s, r, [u])
    first, second = knots.edges.star(e), knots.edges.star(e2)
    for seg, t_lo, t_hi in _adjacent_gaps(knots, u):
        for depth in range(1, EDGE_EQUIVALENCE_SHRINKS + 2):
            t = t_lo + (t_hi - t_lo) / 2**depth
            b = graph.base.point(seg, t)
            a1 = [p for p in s.preimage(b) if first.contains(p)]
            a2 = [p for p in s.preimage(b) if second.contains(p)]
            if len(a1) != 1 or len(a2) != 1 or r(a1[0]) != r(a2[0]):
                return EdgeEquivalence(
                    False, witness=b,
                    detail="range maps differ on every neighbourhood",
                )
    return EdgeEquivalence(True, neighbourhoods=(first, second))


def _adjacent_gaps(
    knots: GraphKnots,
    u: Point,
) -> list[tuple[int, Fraction, Fraction]]:
    """Base gaps next to ``u`` as ``(segment, t at u, t at far end)``."""
    base = knots.base
    if u.vertex is not None:
        out = []
        for seg, end in base.complex.incident(u.vertex):
            ts = base.knots(seg)
            out.append((seg, ts[0], ts[1]) if end == 0
                       else (seg, ts[-1], ts[-2]))
        return out
    assert u.segment is not None
    assert u.t is not None
    ts = base.knots(u.segment)
    k = ts.index(u.t)
    return [(u.segment, u.t, ts[k - 1]), (u.segment, u.t, ts[k + 1])]
