"""Knot sets: canonical refinements whose open stars are evenly covered."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from topcorr.core.errors import PointError
from topcorr.core.space.complex import ONE, ZERO, Complex1, Point
from topcorr.core.space.region import Interval, Region

if TYPE_CHECKING:
    from collections.abc import Iterable

    from topcorr.core.space.plmap import PLMap

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class KnotSet:
    """All vertices of a complex plus interior knots per segment."""

    complex: Complex1
    interior: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def trivial(cls, space: Complex1) -> KnotSet:
        """Vertices only."""
        return cls(complex=space,
                   interior=tuple(() for _ in space.segments))

    def with_points(self, points: Iterable[Point]) -> KnotSet:
        """
        Add points; vertices are already knots.

        :param points: Points of the complex.
        :type points: Iterable[Point]
        :return: The enlarged knot set.
        :rtype: KnotSet
        """
        extra: dict[int, set[Fraction]] = {}
        for p in points:
            self.complex.require(p)
            if p.segment is not None and p.t is not None:
                extra.setdefault(p.segment, set()).add(p.t)
        return KnotSet(
            complex=self.complex,
            interior=tuple(
                tuple(sorted(set(ts) | extra.get(j, set())))
                for j, ts in enumerate(self.interior)
            ),
        )

    def break_loops(self) -> KnotSet:
        """Add the midpoint of every loop segment without interior knots."""
        return self.with_points(
            Point.on(j, Fraction(1, 2))
            for j, seg in enumerate(self.complex.segments)
            if seg.is_loop and not self.interior[j]
        )

    def knots(self, segment: int) -> tuple[Fraction, ...]:
        return (ZERO, *self.interior[segment], ONE)

    def points(self) -> tuple[Point, ...]:
        pts = [Point.at(v) for v in self.complex.vertices]
        for j, ts in enumerate(self.interior):
            pts.extend(Point.on(j, t) for t in ts)
        return tuple(pts)

    def is_knot(self, point: Point) -> bool:
        if point.vertex is not None:
            return self.complex.has_vertex(point.vertex)
        assert point.segment is not None
        return point.t in self.interior[point.segment]

    def _neighbours(self, point: Point) -> tuple[Fraction, Fraction]:
        assert point.segment is not None
        assert point.t is not None
        knots = self.knots(point.segment)
        k = knots.index(point.t)
        return knots[k - 1], knots[k + 1]

    def star(self, point: Point) -> Region:
        """
        Open star of a knot.

        :param point: A knot.
        :type point: Point
        :raises PointError: If the point is not a knot.
        :return: The open star.
        :rtype: Region
        """
        if not self.is_knot(point):
            msg = f"{point} is not a knot"
            raise PointError(msg)
        if point.vertex is not None:
            parts: dict[int, list[Interval]] = {}
            for seg, end in self.complex.incident(point.vertex):
                knots = self.knots(seg)
                iv = (Interval(ZERO, knots[1]) if end == 0
                      else Interval(knots[-2], ONE))
                parts.setdefault(seg, []).append(iv)
            return Region.from_parts(self.complex, [point.vertex], parts)
        assert point.segment is not None
        lo, hi = self._neighbours(point)
        return Region.from_parts(
            self.complex, intervals={point.segment: [Interval(lo, hi)]},
        )

    def closed_star(self, point: Point) -> Region:
        return self.star(point).closure()

    def bisect_around(self, points: Iterable[Point]) -> KnotSet:
        """
        Add the midpoints of every gap adjacent to the given knots.

        :param points: Knots whose stars should shrink.
        :type points: Iterable[Point]
        :return: The refined knot set.
        :rtype: KnotSet
        """
        extra = []
        for p in points:
            if p.vertex is not None:
                for seg, end in self.complex.incident(p.vertex):
                    knots = self.knots(seg)
                    a, b = (knots[0], knots[1]) if end == 0 else (
                        knots[-2], knots[-1],
                    )
                    extra.append(Point.on(seg, (a + b) / 2))
            else:
                assert p.segment is not None
                assert p.t is not None
                lo, hi = self._neighbours(p)
                extra.append(Point.on(p.segment, (lo + p.t) / 2))
                extra.append(Point.on(p.segment, (p.t + hi) / 2))
        return self.with_points(extra)

    def size(self) -> int:
        return len(self.complex.vertices) + sum(map(len, self.interior))


@dataclass(frozen=True)
class GraphKnots:
    """
    Compatible knot sets on the base and edge space of ``s``.

    Base knots hold every vertex, the ``s``-images of every vertex and
    breakpoint of ``s`` and ``r``, and requested extra points; loops are
    broken at midpoints.  Edge knots are exactly ``s^-1(base knots)``,
    so ``s`` maps each edge star homeomorphically onto a base star and
    ``r`` is affine on every edge gap.
    """

    source_map: PLMap
    range_map: PLMap
    base: KnotSet
    edges: KnotSet

    @classmethod
    def build(
        cls,
        source_map: PLMap,
        range_map: PLMap,
        extra: Iterable[Point] = (),
    ) -> GraphKnots:
        """
        Canonical knots for a pair of maps ``s, r : E1 -> E0``.

        :param source_map: The local homeomorphism ``s``.
        :type source_map: PLMap
        :param range_map: The range map ``r``.
        :type range_map: PLMap
        :param extra: Extra base points to include.
        :type extra: Iterable[Point]
        :return: The knots.
        :rtype: GraphKnots
        """
        s = source_map
        crit = [*s.critical_points(), *range_map.critical_points()]
        base = (
            KnotSet.trivial(s.target)
            .with_points([s(p) for p in crit])
            .with_points(extra)
            .break_loops()
        )
        edges = KnotSet.trivial(s.source).with_points(
            q for u in base.points() for q in s.preimage(u)
        )
        _LOGGER.debug("graph knots: %d base, %d edge", base.size(),
                      edges.size())
        return cls(source_map=s, range_map=range_map, base=base, edges=edges)

    def refined(self, extra: Iterable[Point]) -> GraphKnots:
        """Rebuild with additional base points."""
        return GraphKnots.build(self.source_map, self.range_map,
                                [*self.base.points(), *extra])

    def evenly_covered_star(
        self,
        point: Point,
    ) -> tuple[Region, tuple[Region, ...]]:
        """
        Open star of a base knot and its sheets.

        :param point: A base knot.
        :type point: Point
        :return: The star and one sheet per fiber point, ordered by the
            fiber point.
        :rtype: tuple[Region, tuple[Region, ...]]
        """
        star = self.base.star(point)
        sheets = tuple(
            self.edges.star(e) for e in self.source_map.preimage(point)
        )
        return star, sheets


def evenly_covered_star(
    source_map: PLMap,
    range_map: PLMap,
    point: Point,
) -> tuple[Region, tuple[Region, ...]]:
    """
    Evenly covered open star around any base point.

    :param source_map: The local homeomorphism ``s``.
    :type source_map: PLMap
    :param range_map: The range map ``r``.
    :type range_map: PLMap
    :param point: Base point.
    :type point: Point
    :return: The star and its sheets ordered by fiber point.
    :rtype: tuple[Region, tuple[Region, ...]]
    """
    knots = GraphKnots.build(source_map, range_map, [point])
    return knots.evenly_covered_star(point)
