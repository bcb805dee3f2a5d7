"""Piecewise-linear maps between 1-complexes."""

from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import TYPE_CHECKING

from topcorr.core.errors import (
    DegeneratePieceError,
    InvalidMapError,
    PointError,
)
from topcorr.core.space.complex import (
    ONE,
    ZERO,
    Complex1,
    Germ,
    Point,
    Subdivision,
    as_fraction,
    sort_points,
)

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping, Sequence

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Piece:
    """Image of one subsegment: affine into a target segment, or constant."""

    segment: int | None = None
    start: Fraction = ZERO
    stop: Fraction = ZERO
    vertex: str | None = None

    @classmethod
    def affine(
        cls,
        segment: int,
        start: Fraction | int | str,
        stop: Fraction | int | str,
    ) -> Piece:
        """Affine path from ``start`` to ``stop`` in a target segment."""
        return cls(segment=segment, start=as_fraction(start),
                   stop=as_fraction(stop))

    @classmethod
    def constant(cls, vertex: str) -> Piece:
        """Constant at a target vertex."""
        return cls(vertex=vertex)

    @property
    def is_constant(self) -> bool:
        return self.vertex is not None or self.start == self.stop

    def param(self, lo: Fraction, hi: Fraction, t: Fraction) -> Fraction:
        """Target parameter at source parameter ``t`` of ``[lo, hi]``."""
        return self.start + (self.stop - self.start) * (t - lo) / (hi - lo)

    def point(
        self,
        target: Complex1,
        lo: Fraction,
        hi: Fraction,
        t: Fraction,
    ) -> Point:
        """Target point at source parameter ``t`` of ``[lo, hi]``."""
        if self.vertex is not None:
            return Point.at(self.vertex)
        assert self.segment is not None
        return target.point(self.segment, self.param(lo, hi, t))

    def restricted(
        self,
        lo: Fraction,
        hi: Fraction,
        new_lo: Fraction,
        new_hi: Fraction,
    ) -> Piece:
        """The same path restricted to ``[new_lo, new_hi]`` of ``[lo, hi]``."""
        if self.vertex is not None:
            return self
        assert self.segment is not None
        return Piece(
            segment=self.segment,
            start=self.param(lo, hi, new_lo),
            stop=self.param(lo, hi, new_hi),
        )


@dataclass(frozen=True)
class SegmentImage:
    """Breakpoints of one source segment and the image of each subsegment."""

    breaks: tuple[Fraction, ...]
    pieces: tuple[Piece, ...]

    @classmethod
    def single(cls, piece: Piece) -> SegmentImage:
        return cls(breaks=(), pieces=(piece,))

    @classmethod
    def build(
        cls,
        breaks: Iterable[Fraction | int | str],
        pieces: Iterable[Piece],
    ) -> SegmentImage:
        return cls(breaks=tuple(as_fraction(b) for b in breaks),
                   pieces=tuple(pieces))

    @property
    def knots(self) -> tuple[Fraction, ...]:
        return (ZERO, *self.breaks, ONE)

    def locate(self, t: Fraction, sign: int = 1) -> int:
        """
        Index of the piece used at ``t`` in direction ``sign``.

        :param t: Source parameter in [0, 1].
        :type t: Fraction
        :param sign: +1 for the piece to the right of ``t``, -1 for the left.
        :type sign: int
        :return: Piece index.
        :rtype: int
        """
        if sign > 0:
            k = bisect.bisect_right(self.breaks, t)
        else:
            k = bisect.bisect_left(self.breaks, t)
        return min(k, len(self.pieces) - 1)

    def restricted(self, lo: Fraction, hi: Fraction) -> SegmentImage:
        """
        Restriction to ``[lo, hi]``, rescaled to unit parametrization.

        :param lo: Lower source parameter.
        :type lo: Fraction
        :param hi: Upper source parameter.
        :type hi: Fraction
        :return: The rescaled segment image.
        :rtype: SegmentImage
        """
        knots = self.knots
        width = hi - lo
        breaks: list[Fraction] = []
        pieces: list[Piece] = []
        for k, piece in enumerate(self.pieces):
            a, b = knots[k], knots[k + 1]
            u, v = max(a, lo), min(b, hi)
            if u >= v:
                continue
            if pieces:
                breaks.append((u - lo) / width)
            pieces.append(piece.restricted(a, b, u, v))
        return SegmentImage(breaks=tuple(breaks), pieces=tuple(pieces))


@dataclass(frozen=True)
class LocalHomeomorphismReport:
    """Verdict of the local homeomorphism test with its witness."""

    ok: bool
    counterexample: Point | None = None
    reason: str = ""
    checked_points: int = 0


@dataclass(frozen=True)
class PLMap:
    """A continuous piecewise-linear map ``source -> target``."""

    source: Complex1
    target: Complex1
    vertex_images: Mapping[str, Point]
    segment_images: tuple[SegmentImage, ...] = ()

    def __post_init__(self) -> None:
        self._check_shape()
        self._check_continuity()

    def _check_shape(self) -> None:
        missing = [v for v in self.source.vertices
                   if v not in self.vertex_images]
        if missing:
            msg = f"no image for source vertices {missing}"
            raise InvalidMapError(msg)
        for v, image in self.vertex_images.items():
            if not self.target.contains(image):
                msg = f"image {image} of vertex {v!r} is not on the target"
                raise InvalidMapError(msg)
        if len(self.segment_images) != len(self.source.segments):
            msg = (
                f"{len(self.segment_images)} segment images for "
                f"{len(self.source.segments)} source segments"
            )
            raise InvalidMapError(msg)
        for index, image in enumerate(self.segment_images):
            knots = image.knots
            if any(knots[k] >= knots[k + 1] for k in range(len(knots) - 1)):
                msg = f"breakpoints of segment {index} are not increasing"
                raise InvalidMapError(msg)
            if len(image.pieces) != len(knots) - 1:
                msg = f"segment {index} needs {len(knots) - 1} pieces"
                raise InvalidMapError(msg)
            for piece in image.pieces:
                self._check_piece(index, piece)

    def _check_piece(self, index: int, piece: Piece) -> None:
        if piece.vertex is not None:
            if not self.target.has_vertex(piece.vertex):
                msg = f"segment {index}: unknown target vertex {piece.vertex}"
                raise InvalidMapError(msg)
            return
        if piece.segment is None or not (
            0 <= piece.segment < len(self.target.segments)
        ):
            msg = f"segment {index}: target segment {piece.segment} invalid"
            raise InvalidMapError(msg)
        if not (ZERO <= piece.start <= ONE and ZERO <= piece.stop <= ONE):
            msg = f"segment {index}: piece parameters outside [0, 1]"
            raise InvalidMapError(msg)

    def _check_continuity(self) -> None:
        for index, image in enumerate(self.segment_images):
            seg = self.source.segments[index]
            knots = image.knots
            ends = [self.vertex_images[seg.start]]
            for k, piece in enumerate(image.pieces):
                first = piece.point(self.target, knots[k], knots[k + 1],
                                    knots[k])
                if first != ends[-1]:
                    msg = (
                        f"segment {index} is discontinuous at parameter "
                        f"{knots[k]}: {ends[-1]} != {first}"
                    )
                    raise InvalidMapError(msg)
                ends.append(
                    piece.point(self.target, knots[k], knots[k + 1],
                                knots[k + 1]),
                )
            if ends[-1] != self.vertex_images[seg.end]:
                msg = (
                    f"segment {index} ends at {ends[-1]} but vertex "
                    f"{seg.end!r} maps to {self.vertex_images[seg.end]}"
                )
                raise InvalidMapError(msg)

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls, space: Complex1) -> PLMap:
        """Identity map of a complex."""
        return cls(
            source=space,
            target=space,
            vertex_images={v: Point.at(v) for v in space.vertices},
            segment_images=tuple(
                SegmentImage.single(Piece.affine(j, 0, 1))
                for j in range(len(space.segments))
            ),
        )

    @classmethod
    def from_vertex_map(
        cls,
        source: Complex1,
        target: Complex1,
        mapping: Mapping[str, str],
    ) -> PLMap:
        """
        Map of discrete complexes given by vertex ids.

        :param source: Discrete source.
        :type source: Complex1
        :param target: Target complex.
        :type target: Complex1
        :param mapping: Source vertex id to target vertex id.
        :type mapping: Mapping[str, str]
        :return: The map.
        :rtype: PLMap
        """
        return cls(
            source=source,
            target=target,
            vertex_images={v: Point.at(w) for v, w in mapping.items()},
        )

    # -- evaluation ---------------------------------------------------

    def knots(self, segment: int) -> tuple[Fraction, ...]:
        return self.segment_images[segment].knots

    def __call__(self, point: Point) -> Point:
        return self.evaluate(point)

    def evaluate(self, point: Point) -> Point:
        """
        Image of a point.

        :param point: Point of the source.
        :type point: Point
        :raises PointError: If the point is not on the source.
        :return: The image point.
        :rtype: Point
        """
        self.source.require(point)
        if point.vertex is not None:
            return self.vertex_images[point.vertex]
        assert point.segment is not None
        assert point.t is not None
        image = self.segment_images[point.segment]
        k = image.locate(point.t)
        knots = image.knots
        return image.pieces[k].point(self.target, knots[k], knots[k + 1],
                                     point.t)

    def preimage_with_witness(
        self,
        point: Point,
    ) -> tuple[tuple[Point, int | None], ...]:
        """
        Every source point mapped to ``point``, with its source segment.

        :param point: Point of the target.
        :type point: Point
        :raises PointError: If the point is not on the target.
        :raises DegeneratePieceError: If a constant piece maps onto it.
        :return: ``(source point, segment or None for vertices)`` pairs.
        :rtype: tuple[tuple[Point, int | None], ...]
        """
        self.target.require(point)
        found: dict[Point, int | None] = {
            Point.at(v): None
            for v, image in self.vertex_images.items()
            if image == point
        }
        for index, image in enumerate(self.segment_images):
            knots = image.knots
            for k, piece in enumerate(image.pieces):
                a, b = knots[k], knots[k + 1]
                if piece.is_constant:
                    if piece.point(self.target, a, b, a) == point:
                        msg = (
                            f"constant piece on segment {index} over "
                            f"[{a}, {b}] collapses onto {point}"
                        )
                        raise DegeneratePieceError(msg, segment=index)
                    continue
                for t in _solve_piece(self.target, piece, a, b, point):
                    found.setdefault(self.source.point(index, t), index)
        return tuple(sorted(found.items(), key=lambda kv: kv[0].sort_key()))

    def preimage(self, point: Point) -> tuple[Point, ...]:
        """All source points mapped to ``point``, sorted."""
        return tuple(p for p, _ in self.preimage_with_witness(point))

    # -- local structure ----------------------------------------------

    def germ_image(self, germ: Germ) -> Germ | None:
        """
        Image of a source germ, or None when the map is constant there.

        :param germ: A germ of the source.
        :type germ: Germ
        :return: The target germ.
        :rtype: Germ | None
        """
        image = self.segment_images[germ.segment]
        k = image.locate(germ.t, germ.sign)
        piece = image.pieces[k]
        if piece.is_constant:
            return None
        assert piece.segment is not None
        knots = image.knots
        c = piece.param(knots[k], knots[k + 1], germ.t)
        direction = germ.sign if piece.stop > piece.start else -germ.sign
        return Germ(piece.segment, c, direction)

    def critical_points(self) -> tuple[Point, ...]:
        """Source vertices and interior breakpoints."""
        pts = [Point.at(v) for v in self.source.vertices]
        for index, image in enumerate(self.segment_images):
            pts.extend(Point.on(index, t) for t in image.breaks)
        return tuple(pts)

    def local_homeomorphism_report(self) -> LocalHomeomorphismReport:
        """
        Test whether the map is a local homeomorphism.

        Pieces must be non-constant, and at every vertex and breakpoint
        the germ map must be a bijection onto the germs at the image.

        :return: The verdict with a counterexample on failure.
        :rtype: LocalHomeomorphismReport
        """
        for index, image in enumerate(self.segment_images):
            knots = image.knots
            for k, piece in enumerate(image.pieces):
                if piece.is_constant:
                    mid = (knots[k] + knots[k + 1]) / 2
                    return LocalHomeomorphismReport(
                        ok=False,
                        counterexample=Point.on(index, mid),
                        reason="constant piece",
                    )
        points = self.critical_points()
        images = {
            p: [self.germ_image(g) for g in self.source.germs(p)]
            for p in points
        }
        # fold witnesses take precedence over openness failures
        for point in points:
            if len(set(images[point])) != len(images[point]):
                return LocalHomeomorphismReport(
                    ok=False, counterexample=point,
                    reason="fold: two directions share an image germ",
                    checked_points=len(points),
                )
        for point in points:
            targets = set(self.target.germs(self.evaluate(point)))
            if set(images[point]) != targets:
                return LocalHomeomorphismReport(
                    ok=False, counterexample=point,
                    reason="not open: image misses a direction",
                    checked_points=len(points),
                )
        return LocalHomeomorphismReport(ok=True, checked_points=len(points))

    def is_local_homeomorphism(self) -> bool:
        return self.local_homeomorphism_report().ok

    def is_proper(self) -> bool:
        """Always true: the source is a compact finite complex."""
        return True

    # -- algebra of maps ----------------------------------------------

    def compose(self, inner: PLMap) -> PLMap:
        """
        The composite ``self . inner`` (apply ``inner`` first).

        :param inner: Map whose target is this map's source.
        :type inner: PLMap
        :raises InvalidMapError: If the complexes do not match.
        :return: The composite, subdivided so every piece maps into a
            single target segment.
        :rtype: PLMap
        """
        if inner.target != self.source:
            msg = "cannot compose: inner target differs from outer source"
            raise InvalidMapError(msg)
        vertex_images = {
            v: self.evaluate(p) for v, p in inner.vertex_images.items()
        }
        images: list[SegmentImage] = []
        for image in inner.segment_images:
            knots = image.knots
            breaks: list[Fraction] = []
            pieces: list[Piece] = []
            for k, piece in enumerate(image.pieces):
                a, b = knots[k], knots[k + 1]
                for lo, outer in self._pieces_along(piece, a, b):
                    if pieces:
                        breaks.append(lo)
                    pieces.append(outer)
            images.append(
                SegmentImage(breaks=tuple(breaks), pieces=tuple(pieces)),
            )
        return PLMap(source=inner.source, target=self.target,
                     vertex_images=vertex_images,
                     segment_images=tuple(images))

    def _pieces_along(
        self,
        piece: Piece,
        a: Fraction,
        b: Fraction,
    ) -> list[tuple[Fraction, Piece]]:
        """Pieces of ``self . piece`` over ``[a, b]`` with their left ends."""
        if piece.is_constant:
            value = self.evaluate(piece.point(self.source, a, b, a))
            return [(a, _constant_piece(value))]
        assert piece.segment is not None
        image = self.segment_images[piece.segment]
        knots = image.knots
        lo_c, hi_c = sorted((piece.start, piece.stop))
        cuts = sorted({lo_c, hi_c, *(c for c in knots if lo_c < c < hi_c)})
        slope = (piece.stop - piece.start) / (b - a)
        ends = sorted(a + (c - piece.start) / slope for c in cuts)
        out: list[tuple[Fraction, Piece]] = []
        for u, v in zip(ends, ends[1:], strict=False):
            c_u = piece.param(a, b, u)
            c_v = piece.param(a, b, v)
            k = image.locate((c_u + c_v) / 2)
            out.append(
                (u, image.pieces[k].restricted(knots[k], knots[k + 1],
                                               c_u, c_v)),
            )
        return out

    def crossings(self, point: Point) -> tuple[Point, ...]:
        """
        Source points mapped to ``point`` by non-constant pieces or vertices.

        Unlike :meth:`preimage` this skips constant pieces, so it is safe
        for maps that collapse intervals.

        :param point: Point of the target.
        :type point: Point
        :return: Sorted source points.
        :rtype: tuple[Point, ...]
        """
        found = {Point.at(v) for v, image in self.vertex_images.items()
                 if image == point}
        for index, image in enumerate(self.segment_images):
            knots = image.knots
            for k, piece in enumerate(image.pieces):
                if piece.is_constant:
                    continue
                found.update(
                    self.source.point(index, t)
                    for t in _solve_piece(self.target, piece, knots[k],
                                          knots[k + 1], point)
                )
        return sort_points(found)

    def inverse(self) -> PLMap:
        """
        Inverse of a PL homeomorphism.

        :raises InvalidMapError: If the map is not a bijection.
        :return: The inverse map.
        :rtype: PLMap
        """
        vertex_images: dict[str, Point] = {}
        for w in self.target.vertices:
            pre = self.preimage(Point.at(w))
            if len(pre) != 1:
                msg = f"vertex {w!r} has {len(pre)} preimages"
                raise InvalidMapError(msg)
            vertex_images[w] = pre[0]
        sheets: dict[int, list[tuple[Fraction, Fraction, Piece]]] = {
            j: [] for j in range(len(self.target.segments))
        }
        for index, image in enumerate(self.segment_images):
            knots = image.knots
            for k, piece in enumerate(image.pieces):
                if piece.is_constant:
                    msg = f"segment {index} has a constant piece"
                    raise InvalidMapError(msg)
                assert piece.segment is not None
                a, b = knots[k], knots[k + 1]
                if piece.start < piece.stop:
                    entry = (piece.start, piece.stop,
                             Piece(segment=index, start=a, stop=b))
                else:
                    entry = (piece.stop, piece.start,
                             Piece(segment=index, start=b, stop=a))
                sheets[piece.segment].append(entry)
        images: list[SegmentImage] = []
        for j in range(len(self.target.segments)):
            tiles = sorted(sheets[j], key=lambda e: e[0])
            cursor = ZERO
            for lo, hi, _ in tiles:
                if lo != cursor:
                    msg = f"target segment {j} is not covered exactly once"
                    raise InvalidMapError(msg)
                cursor = hi
            if cursor != ONE:
                msg = f"target segment {j} is not covered exactly once"
                raise InvalidMapError(msg)
            images.append(
                SegmentImage(
                    breaks=tuple(lo for lo, _, _ in tiles[1:]),
                    pieces=tuple(p for _, _, p in tiles),
                ),
            )
        return PLMap(source=self.target, target=self.source,
                     vertex_images=vertex_images,
                     segment_images=tuple(images))

    def subdivide_source(self, sub: Subdivision) -> PLMap:
        """
        The same map read on a subdivision of the source.

        :param sub: Subdivision of this map's source.
        :type sub: Subdivision
        :return: The map ``sub.new -> target``.
        :rtype: PLMap
        """
        if sub.old != self.source:
            msg = "subdivision does not refine the source"
            raise InvalidMapError(msg)
        vertex_images = {
            v: self.evaluate(sub.backward(Point.at(v)))
            for v in sub.new.vertices
        }
        images = []
        for new_seg in range(len(sub.new.segments)):
            old_seg, lo, hi = sub.origin(new_seg)
            images.append(self.segment_images[old_seg].restricted(lo, hi))
        return PLMap(source=sub.new, target=self.target,
                     vertex_images=vertex_images,
                     segment_images=tuple(images))

    def rebased(self, source: Complex1) -> PLMap:
        """Same data on a complex with identical vertices and segment count."""
        return PLMap(source=source, target=self.target,
                     vertex_images=self.vertex_images,
                     segment_images=self.segment_images)

    @cached_property
    def image_knots(self) -> tuple[Point, ...]:
        """Images of all source vertices and breakpoints."""
        return sort_points(self.evaluate(p) for p in self.critical_points())


def _constant_piece(value: Point) -> Piece:
    if value.vertex is not None:
        return Piece.constant(value.vertex)
    assert value.segment is not None
    assert value.t is not None
    return Piece(segment=value.segment, start=value.t, stop=value.t)


def _solve_piece(
    target: Complex1,
    piece: Piece,
    a: Fraction,
    b: Fraction,
    point: Point,
) -> list[Fraction]:
    """Source parameters in ``[a, b]`` where a non-constant piece hits."""
    assert piece.segment is not None
    if point.vertex is not None:
        seg = target.segments[piece.segment]
        wanted = []
        if seg.start == point.vertex:
            wanted.append(ZERO)
        if seg.end == point.vertex:
            wanted.append(ONE)
    elif point.segment == piece.segment:
        assert point.t is not None
        wanted = [point.t]
    else:
        return []
    lo, hi = sorted((piece.start, piece.stop))
    return [
        a + (c - piece.start) * (b - a) / (piece.stop - piece.start)
        for c in wanted
        if lo <= c <= hi
    ]


def probe_params(knots: Sequence[Fraction]) -> list[Fraction]:
    """
    Interior parameters that decide equality of PL data on a segment.

    Interior knots plus two interior points of every gap: two affine
    paths agreeing at two points of a gap agree on the whole gap.

    :param knots: Sorted knots including 0 and 1.
    :type knots: Sequence[Fraction]
    :return: Sorted parameters in (0, 1).
    :rtype: list[Fraction]
    """
    out = set()
    for k in range(len(knots) - 1):
        a, b = knots[k], knots[k + 1]
        out.add((3 * a + b) / 4)
        out.add((a + 3 * b) / 4)
        if ZERO < a < ONE:
            out.add(a)
    return sorted(out)
