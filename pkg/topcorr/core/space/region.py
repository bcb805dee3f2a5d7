"""Exact regions of 1-complexes: finite unions of vertices and intervals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

import networkx as nx

from topcorr.core.errors import GraphMismatchError, PointError
from topcorr.core.space.complex import ONE, ZERO, Complex1, Point, sort_points

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Mapping, Sequence

    from topcorr.core.space.complex import Subdivision
    from topcorr.core.space.plmap import PLMap


@dataclass(frozen=True, order=True)
class Interval:
    """A subinterval of a segment parameter range with endpoint flags."""

    lo: Fraction
    hi: Fraction
    lo_closed: bool = False
    hi_closed: bool = False

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def sample(self) -> Fraction:
        """A parameter inside the interval."""
        return (self.lo + self.hi) / 2

    def contains(self, t: Fraction) -> bool:
        if self.lo < t < self.hi:
            return True
        return (t == self.lo and self.lo_closed) or (
            t == self.hi and self.hi_closed
        )

    def meets_range(self, a: Fraction, b: Fraction) -> bool:
        """Whether the interval meets the closed range ``[a, b]``."""
        if self.hi < a or (self.hi == a and not self.hi_closed):
            return False
        return not (self.lo > b or (self.lo == b and not self.lo_closed))


def _segment_cells(cuts: Sequence[Fraction]) -> list[Interval]:
    """Open gaps between consecutive cuts and the interior cut points."""
    cells = []
    for k in range(len(cuts) - 1):
        if k > 0:
            cells.append(Interval(cuts[k], cuts[k], True, True))
        cells.append(Interval(cuts[k], cuts[k + 1]))
    return cells


def _runs(cells: Sequence[Interval], flags: Sequence[bool]) -> tuple[
    Interval, ...
]:
    """Merge maximal runs of flagged consecutive cells into intervals."""
    out: list[Interval] = []
    first: Interval | None = None
    last: Interval | None = None
    for cell, flag in zip(cells, flags, strict=True):
        if flag:
            first = first or cell
            last = cell
            continue
        if first is not None and last is not None:
            out.append(Interval(first.lo, last.hi, first.lo_closed,
                                last.hi_closed))
        first = last = None
    if first is not None and last is not None:
        out.append(Interval(first.lo, last.hi, first.lo_closed,
                            last.hi_closed))
    return tuple(out)


def _cuts(extra: Iterable[Fraction]) -> list[Fraction]:
    return sorted({ZERO, ONE, *(c for c in extra if ZERO < c < ONE)})


@dataclass(frozen=True)
class Region:
    """
    A subset of a complex, normalized to maximal intervals.

    Endpoints 0 and 1 of a segment belong to its vertices, so intervals
    are always open there; membership of the endpoint vertices is
    recorded in ``vertices``.
    """

    complex: Complex1
    vertices: frozenset[str] = frozenset()
    intervals: tuple[tuple[Interval, ...], ...] = ()

    # -- constructors -------------------------------------------------

    @classmethod
    def from_cells(
        cls,
        space: Complex1,
        member: Callable[[Point], bool],
        cuts: Mapping[int, Iterable[Fraction]],
    ) -> Region:
        """
        Region decided cell by cell.

        Membership must be constant on every open gap between the cuts;
        it is evaluated once per gap, per cut point and per vertex.

        :param space: The complex.
        :type space: Complex1
        :param member: Membership predicate.
        :type member: Callable[[Point], bool]
        :param cuts: Interior parameters per segment.
        :type cuts: Mapping[int, Iterable[Fraction]]
        :return: The normalized region.
        :rtype: Region
        """
        segments = []
        for j in range(len(space.segments)):
            cells = _segment_cells(_cuts(cuts.get(j, ())))
            flags = [member(Point.on(j, cell.sample)) for cell in cells]
            segments.append(_runs(cells, flags))
        return cls(
            complex=space,
            vertices=frozenset(
                v for v in space.vertices if member(Point.at(v))
            ),
            intervals=tuple(segments),
        )

    @classmethod
    def from_parts(
        cls,
        space: Complex1,
        vertices: Iterable[str] = (),
        intervals: Mapping[int, Iterable[Interval]] | None = None,
    ) -> Region:
        """
        Union of vertices and segment intervals, normalized.

        :param space: The complex.
        :type space: Complex1
        :param vertices: Vertex ids.
        :type vertices: Iterable[str]
        :param intervals: Intervals per segment index.
        :type intervals: Mapping[int, Iterable[Interval]] | None
        :raises PointError: If a vertex or segment is not on the complex.
        :return: The region.
        :rtype: Region
        """
        verts = frozenset(vertices)
        unknown = [v for v in verts if not space.has_vertex(v)]
        if unknown:
            msg = f"unknown vertices {sorted(unknown)}"
            raise PointError(msg)
        parts = {j: tuple(ivs) for j, ivs in (intervals or {}).items()}
        if any(not 0 <= j < len(space.segments) for j in parts):
            msg = "interval on a segment outside the complex"
            raise PointError(msg)

        def member(point: Point) -> bool:
            if point.vertex is not None:
                return point.vertex in verts
            assert point.segment is not None
            assert point.t is not None
            return any(iv.contains(point.t)
                       for iv in parts.get(point.segment, ()))

        cuts = {j: [c for iv in ivs for c in (iv.lo, iv.hi)]
                for j, ivs in parts.items()}
        return cls.from_cells(space, member, cuts)

    @classmethod
    def empty(cls, space: Complex1) -> Region:
        return cls(complex=space,
                   intervals=tuple(() for _ in space.segments))

    @classmethod
    def whole(cls, space: Complex1) -> Region:
        return cls(
            complex=space,
            vertices=frozenset(space.vertices),
            intervals=tuple((Interval(ZERO, ONE),) for _ in space.segments),
        )

    @classmethod
    def point(cls, space: Complex1, point: Point) -> Region:
        """The singleton ``{point}``."""
        space.require(point)
        if point.vertex is not None:
            return cls.from_parts(space, vertices=[point.vertex])
        assert point.segment is not None
        assert point.t is not None
        return cls.from_parts(
            space,
            intervals={point.segment: [Interval(point.t, point.t, True,
                                                True)]},
        )

    @classmethod
    def open_interval(
        cls,
        space: Complex1,
        segment: int,
        lo: Fraction | int,
        hi: Fraction | int,
    ) -> Region:
        """The open subinterval ``(lo, hi)`` of one segment."""
        return cls.from_parts(
            space,
            intervals={segment: [Interval(Fraction(lo), Fraction(hi))]},
        )

    # -- queries ------------------------------------------------------

    def contains(self, point: Point) -> bool:
        if point.vertex is not None:
            return point.vertex in self.vertices
        assert point.segment is not None
        assert point.t is not None
        return any(iv.contains(point.t)
                   for iv in self.intervals[point.segment])

    def __contains__(self, point: Point) -> bool:
        return self.contains(point)

    def is_empty(self) -> bool:
        return not self.vertices and not any(self.intervals)

    def cut_params(self, segment: int) -> set[Fraction]:
        """Interval endpoints strictly inside the segment."""
        return {
            c for iv in self.intervals[segment] for c in (iv.lo, iv.hi)
            if ZERO < c < ONE
        }

    def all_cuts(self) -> dict[int, set[Fraction]]:
        return {j: self.cut_params(j) for j in range(len(self.intervals))}

    def meets_range(self, segment: int, a: Fraction, b: Fraction) -> bool:
        """Whether the region meets the closed range ``[a, b]`` of a segment."""
        seg = self.complex.segments[segment]
        if a == ZERO and seg.start in self.vertices:
            return True
        if b == ONE and seg.end in self.vertices:
            return True
        return any(iv.meets_range(a, b) for iv in self.intervals[segment])

    def sample_point(self) -> Point | None:
        """Some point of the region, or None when it is empty."""
        if self.vertices:
            return Point.at(min(self.vertices))
        for j, ivs in enumerate(self.intervals):
            if ivs:
                return Point.on(j, ivs[0].sample)
        return None

    def finite_points(self) -> tuple[Point, ...]:
        """
        The points of a finite region.

        :raises PointError: If the region contains an interval.
        :return: Sorted points.
        :rtype: tuple[Point, ...]
        """
        pts = [Point.at(v) for v in self.vertices]
        for j, ivs in enumerate(self.intervals):
            for iv in ivs:
                if not iv.is_point:
                    msg = f"region contains the interval {iv} of segment {j}"
                    raise PointError(msg)
                pts.append(Point.on(j, iv.lo))
        return sort_points(pts)

    # -- set algebra --------------------------------------------------

    def _require_same(self, other: Region) -> None:
        if self.complex is not other.complex and (
            self.complex != other.complex
        ):
            msg = "regions live on different complexes"
            raise GraphMismatchError(msg)

    def _combine(
        self,
        other: Region,
        op: Callable[[bool, bool], bool],
    ) -> Region:
        self._require_same(other)
        cuts = {
            j: self.cut_params(j) | other.cut_params(j)
            for j in range(len(self.complex.segments))
        }
        return Region.from_cells(
            self.complex,
            lambda p: op(self.contains(p), other.contains(p)),
            cuts,
        )

    def union(self, other: Region) -> Region:
        return self._combine(other, lambda a, b: a or b)

    def intersection(self, other: Region) -> Region:
        return self._combine(other, lambda a, b: a and b)

    def difference(self, other: Region) -> Region:
        return self._combine(other, lambda a, b: a and not b)

    def complement(self) -> Region:
        return Region.from_cells(self.complex, lambda p: not self.contains(p),
                                 self.all_cuts())

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def issubset(self, other: Region) -> bool:
        return self.difference(other).is_empty()

    def _cell_flags(self, segment: int) -> tuple[list[Interval], list[bool]]:
        cells = _segment_cells(_cuts(self.cut_params(segment)))
        flags = [
            self.contains(Point.on(segment, cell.sample)) for cell in cells
        ]
        return cells, flags

    def _end_gap_flags(
        self,
        table: Mapping[int, tuple[list[Interval], list[bool]]],
        vertex: str,
    ) -> list[bool]:
        """Membership of the gap next to ``vertex`` on each incident end."""
        out = []
        for seg, end in self.complex.incident(vertex):
            flags = table[seg][1]
            out.append(flags[0] if end == 0 else flags[-1])
        return out

    def closure(self) -> Region:
        """Topological closure."""
        table = {j: self._cell_flags(j)
                 for j in range(len(self.complex.segments))}
        segments = []
        for j in range(len(self.complex.segments)):
            cells, flags = table[j]
            closed = list(flags)
            for k in range(1, len(cells) - 1, 2):
                closed[k] = flags[k] or flags[k - 1] or flags[k + 1]
            segments.append(_runs(cells, closed))
        vertices = frozenset(
            v for v in self.complex.vertices
            if v in self.vertices or any(self._end_gap_flags(table, v))
        )
        return Region(complex=self.complex, vertices=vertices,
                      intervals=tuple(segments))

    def interior(self) -> Region:
        """Topological interior."""
        table = {j: self._cell_flags(j)
                 for j in range(len(self.complex.segments))}
        segments = []
        for j in range(len(self.complex.segments)):
            cells, flags = table[j]
            inner = list(flags)
            for k in range(1, len(cells) - 1, 2):
                inner[k] = flags[k] and flags[k - 1] and flags[k + 1]
            segments.append(_runs(cells, inner))
        vertices = frozenset(
            v for v in self.vertices if all(self._end_gap_flags(table, v))
        )
        return Region(complex=self.complex, vertices=vertices,
                      intervals=tuple(segments))

    def is_open(self) -> bool:
        return self.interior() == self

    def is_closed(self) -> bool:
        return self.closure() == self

    def boundary_points(self) -> tuple[Point, ...]:
        """The finitely many points of ``closure - interior``."""
        return self.closure().difference(self.interior()).finite_points()

    # -- connectivity -------------------------------------------------

    def _adjacency(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(("v", v) for v in self.vertices)
        for j, ivs in enumerate(self.intervals):
            seg = self.complex.segments[j]
            for idx, iv in enumerate(ivs):
                node = ("i", j, idx)
                graph.add_node(node)
                if iv.lo == ZERO and seg.start in self.vertices:
                    graph.add_edge(node, ("v", seg.start))
                if iv.hi == ONE and seg.end in self.vertices:
                    graph.add_edge(node, ("v", seg.end))
        return graph

    def components(self) -> tuple[Region, ...]:
        """
        Connected components, ordered by their first point.

        :return: The components.
        :rtype: tuple[Region, ...]
        """
        out = []
        for nodes in nx.connected_components(self._adjacency()):
            verts = [n[1] for n in nodes if n[0] == "v"]
            parts: dict[int, list[Interval]] = {}
            for n in nodes:
                if n[0] == "i":
                    parts.setdefault(n[1], []).append(
                        self.intervals[n[1]][n[2]],
                    )
            out.append(
                Region(
                    complex=self.complex,
                    vertices=frozenset(verts),
                    intervals=tuple(
                        tuple(sorted(parts.get(j, ())))
                        for j in range(len(self.complex.segments))
                    ),
                ),
            )

        def first(region: Region) -> tuple[int, str, int, Fraction]:
            point = region.sample_point()
            assert point is not None
            return point.sort_key()

        return tuple(sorted(out, key=first))

    def is_connected(self) -> bool:
        graph = self._adjacency()
        return graph.number_of_nodes() > 0 and nx.is_connected(graph)

    def is_contractible(self) -> bool:
        """Nonempty, connected and without cycles."""
        graph = self._adjacency()
        return (
            graph.number_of_nodes() > 0
            and nx.is_connected(graph)
            and graph.number_of_edges() == graph.number_of_nodes() - 1
        )

    def rebind(self, space: Complex1) -> Region:
        """The same vertex ids and intervals read on another complex."""
        return Region(complex=space, vertices=self.vertices,
                      intervals=self.intervals)

    def __str__(self) -> str:
        parts = sorted(self.vertices)
        for j, ivs in enumerate(self.intervals):
            for iv in ivs:
                left = "[" if iv.lo_closed else "("
                right = "]" if iv.hi_closed else ")"
                parts.append(f"{j}:{left}{iv.lo}, {iv.hi}{right}")
        return "{" + "; ".join(parts) + "}"


OpenSet = Region
"""Alias used where a region is required to be open."""


def preimage_region(m: PLMap, region: Region) -> Region:
    """
    The region ``m^-1(region)`` on ``m.source``.

    :param m: A PL map.
    :type m: PLMap
    :param region: Region of ``m.target``.
    :type region: Region
    :return: The preimage.
    :rtype: Region
    """
    cuts: dict[int, set[Fraction]] = {}
    for j, image in enumerate(m.segment_images):
        knots = image.knots
        found = set(knots)
        for k, piece in enumerate(image.pieces):
            if piece.is_constant:
                continue
            assert piece.segment is not None
            a, b = knots[k], knots[k + 1]
            lo, hi = sorted((piece.start, piece.stop))
            found.update(
                a + (c - piece.start) * (b - a) / (piece.stop - piece.start)
                for c in region.cut_params(piece.segment) if lo <= c <= hi
            )
        cuts[j] = found
    return Region.from_cells(m.source, lambda p: region.contains(m(p)), cuts)


def image_region(m: PLMap, region: Region) -> Region:
    """
    The region ``m(region)`` on ``m.target``.

    :param m: A PL map.
    :type m: PLMap
    :param region: Region of ``m.source``.
    :type region: Region
    :return: The image.
    :rtype: Region
    """
    cuts: dict[int, set[Fraction]] = {}
    collapsed: list[tuple[Point, int, Fraction, Fraction]] = []
    for j, image in enumerate(m.segment_images):
        knots = image.knots
        for k, piece in enumerate(image.pieces):
            a, b = knots[k], knots[k + 1]
            if piece.is_constant:
                value = piece.point(m.target, a, b, a)
                collapsed.append((value, j, a, b))
                if value.segment is not None and value.t is not None:
                    cuts.setdefault(value.segment, set()).add(value.t)
                continue
            assert piece.segment is not None
            found = cuts.setdefault(piece.segment, set())
            found.update((piece.start, piece.stop))
            found.update(
                piece.param(a, b, c) for c in region.cut_params(j)
                if a <= c <= b
            )

    def member(point: Point) -> bool:
        if any(region.contains(p) for p in m.crossings(point)):
            return True
        return any(
            value == point and region.meets_range(j, a, b)
            for value, j, a, b in collapsed
        )

    return Region.from_cells(m.target, member, cuts)


def maps_agree_on(m1: PLMap, m2: PLMap, region: Region) -> Point | None:
    """
    First point of ``region`` where two PL maps differ, if any.

    Both maps are affine on every cell cut by their breakpoints and the
    region's endpoints, so two probes per gap decide agreement there.

    :param m1: First map.
    :type m1: PLMap
    :param m2: Second map, with the same source and target.
    :type m2: PLMap
    :param region: Region of the common source.
    :type region: Region
    :return: A disagreement witness, or None when they agree.
    :rtype: Point | None
    """
    if m1.source != m2.source or m1.target != m2.target:
        msg = "maps have different source or target"
        raise GraphMismatchError(msg)
    for v in sorted(region.vertices):
        point = Point.at(v)
        if m1(point) != m2(point):
            return point
    for j in range(len(m1.source.segments)):
        cuts = _cuts({*m1.knots(j), *m2.knots(j), *region.cut_params(j)})
        for cell in _segment_cells(cuts):
            if not region.contains(Point.on(j, cell.sample)):
                continue
            probes = (
                [cell.lo] if cell.is_point
                else [(3 * cell.lo + cell.hi) / 4, (cell.lo + 3 * cell.hi) / 4]
            )
            for t in probes:
                point = Point.on(j, t)
                if m1(point) != m2(point):
                    return point
    return None


def subdivide_region(region: Region, sub: Subdivision) -> Region:
    """
    The same point set read on a subdivision of its complex.

    :param region: Region of ``sub.old``.
    :type region: Region
    :param sub: A subdivision.
    :type sub: Subdivision
    :return: The region on ``sub.new``.
    :rtype: Region
    """
    cuts = {}
    for new_seg in range(len(sub.new.segments)):
        old_seg, lo, hi = sub.origin(new_seg)
        cuts[new_seg] = {
            (c - lo) / (hi - lo) for c in region.cut_params(old_seg)
            if lo < c < hi
        }
    return Region.from_cells(
        sub.new, lambda p: region.contains(sub.backward(p)), cuts,
    )
