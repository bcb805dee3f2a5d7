"""Piecewise-polynomial scalar fields on 1-complexes."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import numpy as np
from numpy.polynomial import Polynomial

from topcorr.core.constants import SAMPLE_TOLERANCE
from topcorr.core.errors import DegeneratePieceError, GraphMismatchError
from topcorr.core.space.complex import (
    ONE,
    ZERO,
    Complex1,
    Point,
    Scalar,
    as_fraction,
)

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Mapping

    from topcorr.core.space.plmap import PLMap

Poly = tuple[Any, ...]
"""Polynomial coefficients, lowest degree first."""

_ZERO_POLY: Poly = (ZERO,)


def poly_trim(p: Poly) -> Poly:
    """Drop trailing zero coefficients, keeping at least one."""
    out = list(p)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out) if out else _ZERO_POLY


def poly_add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return poly_trim(tuple(
        (p[k] if k < len(p) else 0) + (q[k] if k < len(q) else 0)
        for k in range(n)
    ))


def poly_scale(p: Poly, c: Scalar) -> Poly:
    return poly_trim(tuple(c * a for a in p))


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: list[Any] = [ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return poly_trim(tuple(out))


def poly_eval(p: Poly, t: Scalar) -> Any:
    acc: Any = ZERO
    for a in reversed(p):
        acc = acc * t + a
    return acc


def poly_compose_affine(p: Poly, c0: Scalar, c1: Scalar) -> Poly:
    """The polynomial ``t -> p(c0 + c1 t)``."""
    acc: Poly = _ZERO_POLY
    for a in reversed(p):
        acc = poly_add(poly_mul(acc, (c0, c1)), (a,))
    return acc


def poly_conj(p: Poly) -> Poly:
    return tuple(a.conjugate() for a in p)


def poly_derivative(p: Poly) -> Poly:
    if len(p) == 1:
        return _ZERO_POLY
    return poly_trim(tuple(k * p[k] for k in range(1, len(p))))


def _real(value: Any) -> Any:
    if isinstance(value, complex):
        return value.real
    return value


_SNAP_DENOMINATORS = (10, 1000, 10**6)
_NEWTON_STEPS = 4
_NEWTON_DENOMINATOR = 10**15


def _is_rational(p: Poly) -> bool:
    return all(isinstance(a, int | Fraction) for a in p)


def _rational_sqrt(value: Fraction) -> Fraction | None:
    num, den = math.isqrt(value.numerator), math.isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None


def _rational_quadratic_roots(q: Poly) -> list[Fraction] | None:
    """Exact real roots of a rational quadratic, or ``None`` if irrational."""
    if len(q) != 3 or not _is_rational(q):  # noqa: PLR2004
        return None
    c, b, a = (Fraction(x) for x in q)
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    root = _rational_sqrt(disc)
    if root is None:
        return None
    return [(-b - root) / (2 * a), (-b + root) / (2 * a)]


def _snap_root(q: Poly, approx: float) -> Fraction:
    """Rational value of a numeric root; exact when the root is rational."""
    if not _is_rational(q):
        return as_fraction(approx)
    guess = Fraction(approx)
    for bound in _SNAP_DENOMINATORS:
        candidate = guess.limit_denominator(bound)
        if poly_eval(q, candidate) == 0:
            return candidate
    dq = poly_derivative(q)
    for _ in range(_NEWTON_STEPS):
        slope = poly_eval(dq, guess)
        if slope == 0:
            break
        guess = (guess - poly_eval(q, guess) / slope).limit_denominator(
            _NEWTON_DENOMINATOR,
        )
    return guess


def poly_solve(p: Poly, level: Scalar, lo: Fraction, hi: Fraction) -> list[
    Fraction
]:
    """
    Parameters in the open interval ``(lo, hi)`` where ``p`` equals ``level``.

    Linear pieces and quadratics with a rational square discriminant are
    solved exactly. Higher degrees go through
    :class:`numpy.polynomial.Polynomial` roots, which are snapped to a
    rational root when exact substitution confirms one and otherwise
    refined by rational Newton steps.

    :param p: Real-valued polynomial.
    :type p: Poly
    :param level: The level.
    :type level: Scalar
    :param lo: Lower end.
    :type lo: Fraction
    :param hi: Upper end.
    :type hi: Fraction
    :return: Sorted solutions.
    :rtype: list[Fraction]
    """
    q = poly_trim(tuple(_real(a) for a in poly_add(p, (-level,))))
    if len(q) == 1:
        return []
    if len(q) == 2:  # noqa: PLR2004
        root = as_fraction(-q[0] / q[1])
        return [root] if lo < root < hi else []
    exact = _rational_quadratic_roots(q)
    if exact is not None:
        return sorted({r for r in exact if lo < r < hi})
    roots = Polynomial([float(a) for a in q]).roots()
    out = []
    for r in roots:
        if abs(r.imag) > SAMPLE_TOLERANCE:
            continue
        value = _snap_root(q, float(r.real))
        if lo < value < hi:
            out.append(value)
    return sorted(set(out))


@dataclass(frozen=True)
class SegmentField:
    """Knots of one segment (0 and 1 included) and a polynomial per gap."""

    knots: tuple[Fraction, ...]
    pieces: tuple[Poly, ...]

    @classmethod
    def constant(cls, value: Scalar) -> SegmentField:
        return cls(knots=(ZERO, ONE), pieces=((value,),))

    @classmethod
    def linear(
        cls,
        values: Iterable[tuple[Fraction, Scalar]],
    ) -> SegmentField:
        """
        Linear interpolation through ``(t, value)`` pairs.

        :param values: Pairs sorted by ``t``, including ``t = 0`` and ``1``.
        :type values: Iterable[tuple[Fraction, Scalar]]
        :return: The piecewise-linear segment field.
        :rtype: SegmentField
        """
        pts = list(values)
        pieces = []
        for (t0, y0), (t1, y1) in zip(pts, pts[1:], strict=False):
            slope = (y1 - y0) / (t1 - t0)
            pieces.append(poly_trim((y0 - slope * t0, slope)))
        return cls(knots=tuple(t for t, _ in pts), pieces=tuple(pieces))

    def locate(self, t: Fraction) -> int:
        k = bisect.bisect_right(self.knots, t) - 1
        return min(max(k, 0), len(self.pieces) - 1)

    def piece_at(self, t: Fraction) -> Poly:
        return self.pieces[self.locate(t)]

    def __call__(self, t: Fraction) -> Any:
        return poly_eval(self.piece_at(t), t)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """
    A real or complex field on a complex.

    Values at vertices are stored explicitly; each segment carries a
    polynomial per gap between its knots.
    """

    complex: Complex1
    vertex_values: Mapping[str, Any]
    segments: tuple[SegmentField, ...] = ()

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, space: Complex1, value: Scalar) -> ScalarField:
        """Constant field."""
        return cls(
            complex=space,
            vertex_values=dict.fromkeys(space.vertices, value),
            segments=tuple(
                SegmentField.constant(value) for _ in space.segments
            ),
        )

    @classmethod
    def zero(cls, space: Complex1) -> ScalarField:
        return cls.constant(space, ZERO)

    @classmethod
    def from_vertex_values(
        cls,
        space: Complex1,
        values: Mapping[str, Scalar],
        default: Scalar = ZERO,
    ) -> ScalarField:
        """
        Field interpolating vertex values linearly along every segment.

        :param space: The complex.
        :type space: Complex1
        :param values: Values at (some) vertices.
        :type values: Mapping[str, Scalar]
        :param default: Value at vertices missing from ``values``.
        :type default: Scalar
        :return: The field.
        :rtype: ScalarField
        """
        return cls.piecewise_linear(space, values, {}, default=default)

    @classmethod
    def piecewise_linear(
        cls,
        space: Complex1,
        vertex_values: Mapping[str, Scalar],
        interior: Mapping[int, Mapping[Fraction, Scalar]],
        default: Scalar = ZERO,
    ) -> ScalarField:
        """
        Piecewise-linear field through vertex and interior knot values.

        :param space: The complex.
        :type space: Complex1
        :param vertex_values: Values at vertices.
        :type vertex_values: Mapping[str, Scalar]
        :param interior: Per segment, values at interior parameters.
        :type interior: Mapping[int, Mapping[Fraction, Scalar]]
        :param default: Value at vertices missing from ``vertex_values``.
        :type default: Scalar
        :return: The field.
        :rtype: ScalarField
        """
        values = {v: vertex_values.get(v, default) for v in space.vertices}
        segments = []
        for index, seg in enumerate(space.segments):
            inner = sorted(
                (as_fraction(t), y)
                for t, y in interior.get(index, {}).items()
                if ZERO < as_fraction(t) < ONE
            )
            pts = [(ZERO, values[seg.start]), *inner, (ONE, values[seg.end])]
            segments.append(SegmentField.linear(pts))
        return cls(complex=space, vertex_values=values,
                   segments=tuple(segments))

    @classmethod
    def sampled(
        cls,
        space: Complex1,
        fn: Callable[[Point], Scalar],
        per_segment: int,
        anchors: Mapping[int, Iterable[Fraction]] | None = None,
    ) -> ScalarField:
        """
        Piecewise-linear interpolation of a function on a grid.

        :param space: The complex.
        :type space: Complex1
        :param fn: Function evaluated at vertices and grid points.
        :type fn: Callable[[Point], Scalar]
        :param per_segment: Interior grid points per segment.
        :type per_segment: int
        :param anchors: Extra parameters per segment added to the grid.
        :type anchors: Mapping[int, Iterable[Fraction]] | None
        :return: The sampled field.
        :rtype: ScalarField
        """
        anchors = anchors or {}
        vertex_values = {v: fn(Point.at(v)) for v in space.vertices}
        interior: dict[int, dict[Fraction, Scalar]] = {}
        for index in range(len(space.segments)):
            grid = {Fraction(k, per_segment + 1)
                    for k in range(1, per_segment + 1)}
            grid.update(t for t in anchors.get(index, ()) if ZERO < t < ONE)
            interior[index] = {t: fn(Point.on(index, t)) for t in grid}
        return cls.piecewise_linear(space, vertex_values, interior)

    # -- evaluation ---------------------------------------------------

    def evaluate(self, point: Point) -> Any:
        """
        Value at a point.

        :param point: Point of the complex.
        :type point: Point
        :return: The value.
        :rtype: Any
        """
        self.complex.require(point)
        if point.vertex is not None:
            return self.vertex_values[point.vertex]
        assert point.segment is not None
        assert point.t is not None
        return self.segments[point.segment](point.t)

    def __call__(self, point: Point) -> Any:
        return self.evaluate(point)

    def knots(self, segment: int) -> tuple[Fraction, ...]:
        return self.segments[segment].knots

    def slope_at(self, segment: int, t: Fraction) -> Any:
        """Derivative along the segment on the gap to the right of ``t``."""
        return poly_eval(poly_derivative(self.segments[segment].piece_at(t)),
                         t)

    def knot_values(self) -> list[Any]:
        """Values at every vertex and interior knot."""
        out = list(self.vertex_values.values())
        for seg in self.segments:
            for k in range(1, len(seg.knots) - 1):
                out.append(seg(seg.knots[k]))
        return out

    # -- algebra ------------------------------------------------------

    def _require_same(self, other: ScalarField) -> None:
        if self.complex is not other.complex and (
            self.complex != other.complex
        ):
            msg = "fields live on different complexes"
            raise GraphMismatchError(msg)

    def _combine(
        self,
        other: ScalarField,
        poly_op: Callable[[Poly, Poly], Poly],
        value_op: Callable[[Any, Any], Any],
    ) -> ScalarField:
        self._require_same(other)
        vertex_values = {
            v: value_op(self.vertex_values[v], other.vertex_values[v])
            for v in self.complex.vertices
        }
        segments = []
        for mine, theirs in zip(self.segments, other.segments, strict=True):
            knots = tuple(sorted(set(mine.knots) | set(theirs.knots)))
            pieces = tuple(
                poly_op(mine.piece_at((knots[k] + knots[k + 1]) / 2),
                        theirs.piece_at((knots[k] + knots[k + 1]) / 2))
                for k in range(len(knots) - 1)
            )
            segments.append(SegmentField(knots=knots, pieces=pieces))
        return ScalarField(complex=self.complex, vertex_values=vertex_values,
                           segments=tuple(segments))

    def map_pieces(
        self,
        poly_op: Callable[[Poly], Poly],
        value_op: Callable[[Any], Any],
    ) -> ScalarField:
        """Apply a coefficient-wise operation to every piece and value."""
        return ScalarField(
            complex=self.complex,
            vertex_values={v: value_op(y)
                           for v, y in self.vertex_values.items()},
            segments=tuple(
                SegmentField(knots=s.knots,
                             pieces=tuple(poly_op(p) for p in s.pieces))
                for s in self.segments
            ),
        )

    def __add__(self, other: ScalarField) -> ScalarField:
        return self._combine(other, poly_add, lambda a, b: a + b)

    def __sub__(self, other: ScalarField) -> ScalarField:
        return self + other.scale(-1)

    def __mul__(self, other: ScalarField) -> ScalarField:
        return self._combine(other, poly_mul, lambda a, b: a * b)

    def __neg__(self) -> ScalarField:
        return self.scale(-1)

    def scale(self, c: Scalar) -> ScalarField:
        return self.map_pieces(lambda p: poly_scale(p, c), lambda y: c * y)

    def conjugate(self) -> ScalarField:
        return self.map_pieces(poly_conj, lambda y: y.conjugate())

    # -- transport along maps -----------------------------------------

    def pullback(self, m: PLMap) -> ScalarField:
        """
        The composite ``self . m`` as a field on ``m.source``.

        :param m: Map into this field's complex.
        :type m: PLMap
        :raises GraphMismatchError: If ``m`` does not land on the complex.
        :return: The pulled-back field.
        :rtype: ScalarField
        """
        if m.target != self.complex:
            msg = "cannot pull back: map target differs from field complex"
            raise GraphMismatchError(msg)
        vertex_values = {
            v: self.evaluate(p) for v, p in m.vertex_images.items()
        }
        segments = []
        for image in m.segment_images:
            knots_out: list[Fraction] = [ZERO]
            pieces_out: list[Poly] = []
            mk = image.knots
            for k, piece in enumerate(image.pieces):
                a, b = mk[k], mk[k + 1]
                if piece.is_constant:
                    value = self.evaluate(piece.point(m.target, a, b, a))
                    knots_out.append(b)
                    pieces_out.append((value,))
                    continue
                assert piece.segment is not None
                target = self.segments[piece.segment]
                slope = (piece.stop - piece.start) / (b - a)
                c0 = piece.start - slope * a
                lo_c, hi_c = sorted((piece.start, piece.stop))
                cuts = sorted(
                    a + (c - piece.start) / slope
                    for c in target.knots if lo_c < c < hi_c
                )
                ends = [a, *cuts, b]
                for u, v in zip(ends, ends[1:], strict=False):
                    mid_c = c0 + slope * (u + v) / 2
                    pieces_out.append(
                        poly_compose_affine(target.piece_at(mid_c), c0, slope),
                    )
                    knots_out.append(v)
            segments.append(
                SegmentField(knots=tuple(knots_out), pieces=tuple(pieces_out)),
            )
        return ScalarField(complex=m.source, vertex_values=vertex_values,
                           segments=tuple(segments))

    def fiber_sum(self, s: PLMap) -> ScalarField:
        """
        Sum over fibers: ``v -> sum of self(e) over s(e) = v``.

        Vertex values are explicit enumerated sums; on segment gaps the
        sum is assembled from every sheet covering the gap.

        :param s: A local homeomorphism out of this field's complex.
        :type s: PLMap
        :raises GraphMismatchError: If ``s`` does not start on the complex.
        :raises DegeneratePieceError: If ``s`` collapses an interval.
        :return: The field on ``s.target``.
        :rtype: ScalarField
        """
        if s.source != self.complex:
            msg = "cannot sum over fibers: map source differs from complex"
            raise GraphMismatchError(msg)
        target = s.target
        vertex_values = {
            w: sum((self.evaluate(p) for p in s.preimage(Point.at(w))), ZERO)
            for w in target.vertices
        }
        sheets: dict[int, list[tuple[int, Fraction, Fraction, Fraction,
                                     Fraction]]] = {}
        for j, image in enumerate(s.segment_images):
            knots = image.knots
            for k, piece in enumerate(image.pieces):
                a, b = knots[k], knots[k + 1]
                if piece.is_constant:
                    msg = f"segment {j} collapses [{a}, {b}] to a point"
                    raise DegeneratePieceError(msg, segment=j)
                assert piece.segment is not None
                sheets.setdefault(piece.segment, []).append(
                    (j, a, b, piece.start, piece.stop),
                )
        segments = []
        for sigma in range(len(target.segments)):
            entries = sheets.get(sigma, [])
            cuts = {ZERO, ONE}
            for j, a, b, start, stop in entries:
                cuts.update((start, stop))
                cuts.update(
                    start + (stop - start) * (t - a) / (b - a)
                    for t in self.segments[j].knots if a < t < b
                )
            ordered = sorted(cuts)
            pieces = []
            for lo, hi in zip(ordered, ordered[1:], strict=False):
                total: Poly = _ZERO_POLY
                for j, a, b, start, stop in entries:
                    if not (min(start, stop) <= lo and hi <= max(start, stop)):
                        continue
                    d1 = (b - a) / (stop - start)
                    d0 = a - start * d1
                    poly = self.segments[j].piece_at(d0 + d1 * (lo + hi) / 2)
                    total = poly_add(total, poly_compose_affine(poly, d0, d1))
                pieces.append(total)
            segments.append(SegmentField(knots=tuple(ordered),
                                         pieces=tuple(pieces)))
        return ScalarField(complex=target, vertex_values=vertex_values,
                           segments=tuple(segments))

    # -- norms --------------------------------------------------------

    def sup_abs(self) -> float:
        """
        Supremum of ``|f|`` over the complex.

        Each piece is maximized through the critical points of
        ``|p|^2 = p * conj(p)``.

        :return: The supremum.
        :rtype: float
        """
        best = max((abs(complex(y)) for y in self.vertex_values.values()),
                   default=0.0)
        for seg in self.segments:
            for k, p in enumerate(seg.pieces):
                a, b = float(seg.knots[k]), float(seg.knots[k + 1])
                sq = poly_mul(p, poly_conj(p))
                poly = Polynomial([float(_real(complex(c).real)) for c in sq])
                candidates = [a, b]
                if poly.degree() >= 2:  # noqa: PLR2004
                    candidates.extend(
                        float(r.real) for r in poly.deriv().roots()
                        if abs(r.imag) < SAMPLE_TOLERANCE and a < r.real < b
                    )
                values = np.maximum(poly(np.asarray(candidates)), 0.0)
                best = max(best, math.sqrt(float(values.max())))
        return best

    def max_real(self) -> float:
        """Maximum of the real part over knots (exact for PL fields)."""
        return max(float(_real(complex(y).real)) for y in self.knot_values())
