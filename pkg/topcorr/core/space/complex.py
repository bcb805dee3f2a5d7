"""Finite 1-dimensional simplicial complexes, points and subdivisions."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import TYPE_CHECKING, NamedTuple

import networkx as nx

from topcorr.core.errors import ComplexError, PointError

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping

Scalar = Fraction | int | float | complex

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(value: Fraction | int | float | str) -> Fraction:
    """
    Convert a number to an exact rational.

    Floats go through their decimal text, so ``0.9`` becomes ``9/10``.

    :param value: The number or rational string (``"1/3"``).
    :type value: Fraction | int | float | str
    :return: The exact rational.
    :rtype: Fraction
    """
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class Point:
    """A vertex of a complex or an interior point of one of its segments."""

    vertex: str | None = None
    segment: int | None = None
    t: Fraction | None = None

    def __post_init__(self) -> None:
        if (self.vertex is None) == (self.segment is None):
            msg = "a point is either a vertex or a segment parameter"
            raise PointError(msg)
        if self.segment is not None:
            if self.t is None or not ZERO < self.t < ONE:
                msg = f"interior parameter must lie in (0, 1), got {self.t}"
                raise PointError(msg)

    @classmethod
    def at(cls, vertex: str) -> Point:
        """Vertex point."""
        return cls(vertex=vertex)

    @classmethod
    def on(cls, segment: int, t: Fraction | int | float | str) -> Point:
        """Interior point; ``t`` must lie strictly inside (0, 1)."""
        return cls(segment=segment, t=as_fraction(t))

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def sort_key(self) -> tuple[int, str, int, Fraction]:
        """Vertices first (by id), then interior points by (segment, t)."""
        if self.vertex is not None:
            return (0, self.vertex, -1, ZERO)
        return (1, "", self.segment if self.segment is not None else -1,
                self.t if self.t is not None else ZERO)

    def __str__(self) -> str:
        if self.vertex is not None:
            return self.vertex
        return f"{self.segment}:{self.t}"


def sort_points(points: Iterable[Point]) -> tuple[Point, ...]:
    """
    Sort points in edge-space lexicographic order.

    :param points: The points.
    :type points: Iterable[Point]
    :return: The sorted, duplicate-free points.
    :rtype: tuple[Point, ...]
    """
    return tuple(sorted(set(points), key=Point.sort_key))


class Germ(NamedTuple):
    """A direction leaving a point: segment, parameter and orientation."""

    segment: int
    t: Fraction
    sign: int


@dataclass(frozen=True)
class Segment:
    """A segment with unit parametrization from ``start`` to ``end``."""

    start: str
    end: str

    @property
    def is_loop(self) -> bool:
        return self.start == self.end


@dataclass(frozen=True)
class Complex1:
    """A finite 1-dimensional simplicial complex.

    The realization is compact and has covering dimension at most 1;
    both follow from the finite data and are not checked further.
    """

    vertices: tuple[str, ...]
    segments: tuple[Segment, ...] = ()

    def __post_init__(self) -> None:
        if len(set(self.vertices)) != len(self.vertices):
            msg = "duplicate vertex ids"
            raise ComplexError(msg)
        known = set(self.vertices)
        for index, seg in enumerate(self.segments):
            for end in (seg.start, seg.end):
                if end not in known:
                    msg = f"segment {index} references unknown vertex {end!r}"
                    raise ComplexError(msg)

    @classmethod
    def build(
        cls,
        vertices: Iterable[str],
        segments: Iterable[tuple[str, str]] = (),
    ) -> Complex1:
        """
        Build a complex from vertex ids and endpoint pairs.

        :param vertices: Vertex ids.
        :type vertices: Iterable[str]
        :param segments: ``(start, end)`` pairs.
        :type segments: Iterable[tuple[str, str]]
        :return: The complex.
        :rtype: Complex1
        """
        return cls(
            vertices=tuple(vertices),
            segments=tuple(Segment(a, b) for a, b in segments),
        )

    @cached_property
    def _vertex_set(self) -> frozenset[str]:
        return frozenset(self.vertices)

    @cached_property
    def _incidence(self) -> dict[str, tuple[tuple[int, int], ...]]:
        table: dict[str, list[tuple[int, int]]] = {
            v: [] for v in self.vertices
        }
        for index, seg in enumerate(self.segments):
            table[seg.start].append((index, 0))
            table[seg.end].append((index, 1))
        return {v: tuple(ends) for v, ends in table.items()}

    @property
    def is_discrete(self) -> bool:
        return not self.segments

    def has_vertex(self, vertex: str) -> bool:
        return vertex in self._vertex_set

    def point(self, segment: int, t: Fraction | int | float | str) -> Point:
        """
        Point at parameter ``t`` of a segment, normalized at endpoints.

        :param segment: Segment index.
        :type segment: int
        :param t: Parameter in [0, 1].
        :type t: Fraction | int | float | str
        :raises PointError: If the segment or parameter is out of range.
        :return: The point; ``t`` in {0, 1} gives the endpoint vertex.
        :rtype: Point
        """
        if not 0 <= segment < len(self.segments):
            msg = f"segment index {segment} out of range"
            raise PointError(msg)
        value = as_fraction(t)
        if value == ZERO:
            return Point.at(self.segments[segment].start)
        if value == ONE:
            return Point.at(self.segments[segment].end)
        if not ZERO < value < ONE:
            msg = f"parameter {value} outside [0, 1]"
            raise PointError(msg)
        return Point.on(segment, value)

    def contains(self, point: Point) -> bool:
        if point.vertex is not None:
            return point.vertex in self._vertex_set
        return point.segment is not None and 0 <= point.segment < len(
            self.segments,
        )

    def require(self, point: Point) -> None:
        """
        Raise unless the point lies on this complex.

        :param point: The point.
        :type point: Point
        :raises PointError: If the point is not on the complex.
        """
        if not self.contains(point):
            msg = f"point {point} does not lie on the complex"
            raise PointError(msg)

    def incident(self, vertex: str) -> tuple[tuple[int, int], ...]:
        """Incident segment ends ``(segment, 0 | 1)``; loops appear twice."""
        return self._incidence.get(vertex, ())

    def germs(self, point: Point) -> tuple[Germ, ...]:
        """
        Directions leaving a point.

        :param point: The point.
        :type point: Point
        :return: One germ per incident segment end (two for interior points).
        :rtype: tuple[Germ, ...]
        """
        if point.vertex is not None:
            return tuple(
                Germ(seg, ZERO, 1) if end == 0 else Germ(seg, ONE, -1)
                for seg, end in self.incident(point.vertex)
            )
        assert point.segment is not None
        assert point.t is not None
        return (Germ(point.segment, point.t, 1),
                Germ(point.segment, point.t, -1))

    @cached_property
    def component_labels(self) -> dict[str, int]:
        """Connected-component label of every vertex."""
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from((s.start, s.end) for s in self.segments)
        comps = sorted(
            (sorted(c) for c in nx.connected_components(graph)),
            key=lambda c: c[0],
        )
        return {v: label for label, comp in enumerate(comps) for v in comp}

    def component_of(self, point: Point) -> int:
        """Component label of a point."""
        if point.vertex is not None:
            return self.component_labels[point.vertex]
        assert point.segment is not None
        return self.component_labels[self.segments[point.segment].start]

    def sample_points(self, per_segment: int) -> tuple[Point, ...]:
        """
        Vertices plus an even interior grid on every segment.

        :param per_segment: Number of interior grid points per segment.
        :type per_segment: int
        :return: The sample points.
        :rtype: tuple[Point, ...]
        """
        pts = [Point.at(v) for v in self.vertices]
        for index in range(len(self.segments)):
            pts.extend(
                Point.on(index, Fraction(k, per_segment + 1))
                for k in range(1, per_segment + 1)
            )
        return tuple(pts)

    def subdivide(self, cuts: Mapping[int, Iterable[Fraction]]) -> Subdivision:
        """
        Subdivide segments at interior parameters.

        :param cuts: Interior parameters per segment index.
        :type cuts: Mapping[int, Iterable[Fraction]]
        :return: The subdivision relating old and new complexes.
        :rtype: Subdivision
        """
        return Subdivision.build(self, cuts)

    def with_segments(self, segments: Iterable[Segment]) -> Complex1:
        """Same vertices, new segment list."""
        return Complex1(vertices=self.vertices, segments=tuple(segments))


@dataclass(frozen=True)
class SegmentSplit:
    """How one old segment is cut into consecutive new segments."""

    old_segment: int
    cuts: tuple[Fraction, ...]
    new_segments: tuple[int, ...]

    def locate(self, t: Fraction) -> tuple[int, Fraction, Fraction]:
        """New segment and old-parameter range containing ``t``."""
        k = min(bisect.bisect_right(self.cuts, t) - 1, len(self.cuts) - 2)
        k = max(k, 0)
        return self.new_segments[k], self.cuts[k], self.cuts[k + 1]


@dataclass(frozen=True)
class Subdivision:
    """An old complex, its subdivision, and the point maps between them."""

    old: Complex1
    new: Complex1
    splits: tuple[SegmentSplit, ...]
    cut_vertices: dict[Point, str] = field(hash=False)

    @classmethod
    def build(
        cls,
        old: Complex1,
        cuts: Mapping[int, Iterable[Fraction]],
    ) -> Subdivision:
        """
        Subdivide ``old`` at the given interior parameters.

        :param old: The complex to subdivide.
        :type old: Complex1
        :param cuts: Interior parameters per segment.
        :type cuts: Mapping[int, Iterable[Fraction]]
        :return: The subdivision.
        :rtype: Subdivision
        """
        taken = set(old.vertices)
        vertices = list(old.vertices)
        segments: list[Segment] = []
        splits: list[SegmentSplit] = []
        cut_vertices: dict[Point, str] = {}
        for index, seg in enumerate(old.segments):
            inner = sorted({
                as_fraction(t) for t in cuts.get(index, ())
                if ZERO < as_fraction(t) < ONE
            })
            names = [seg.start]
            for t in inner:
                name = f"[{index}:{t}]"
                while name in taken:
                    name += "'"
                taken.add(name)
                vertices.append(name)
                names.append(name)
                cut_vertices[Point.on(index, t)] = name
            names.append(seg.end)
            first = len(segments)
            segments.extend(
                Segment(names[k], names[k + 1]) for k in range(len(names) - 1)
            )
            splits.append(
                SegmentSplit(
                    old_segment=index,
                    cuts=(ZERO, *inner, ONE),
                    new_segments=tuple(range(first, len(segments))),
                ),
            )
        new = Complex1(vertices=tuple(vertices), segments=tuple(segments))
        return cls(old=old, new=new, splits=tuple(splits),
                   cut_vertices=cut_vertices)

    @cached_property
    def _origin(self) -> dict[int, tuple[int, Fraction, Fraction]]:
        table: dict[int, tuple[int, Fraction, Fraction]] = {}
        for split in self.splits:
            for k, new_seg in enumerate(split.new_segments):
                table[new_seg] = (
                    split.old_segment, split.cuts[k], split.cuts[k + 1],
                )
        return table

    @cached_property
    def _cut_points(self) -> dict[str, Point]:
        return {name: p for p, name in self.cut_vertices.items()}

    def origin(self, new_segment: int) -> tuple[int, Fraction, Fraction]:
        """Old segment and old-parameter range of a new segment."""
        return self._origin[new_segment]

    def forward(self, point: Point) -> Point:
        """
        Old point to the same point on the subdivided complex.

        :param point: Point on the old complex.
        :type point: Point
        :return: Point on the new complex.
        :rtype: Point
        """
        if point.vertex is not None:
            return point
        if point in self.cut_vertices:
            return Point.at(self.cut_vertices[point])
        assert point.segment is not None
        assert point.t is not None
        new_seg, lo, hi = self.splits[point.segment].locate(point.t)
        return Point.on(new_seg, (point.t - lo) / (hi - lo))

    def backward(self, point: Point) -> Point:
        """
        New point to the same point on the old complex.

        :param point: Point on the new complex.
        :type point: Point
        :return: Point on the old complex.
        :rtype: Point
        """
        if point.vertex is not None:
            return self._cut_points.get(point.vertex, point)
        assert point.segment is not None
        assert point.t is not None
        old_seg, lo, hi = self._origin[point.segment]
        return self.old.point(old_seg, lo + point.t * (hi - lo))
