"""Unitaries between correspondences: pullbacks, flips and composites."""

from __future__ import annotations

import cmath
import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Any

from topcorr.core.corr import CorrVector
from topcorr.core.cover.permutations import (
    compose,
    transposition,
)
from topcorr.core.errors import (
    FlipSpecError,
    GraphMismatchError,
    PermutationMismatchError,
)
from topcorr.core.settings import get_settings
from topcorr.core.space.complex import Point, sort_points
from topcorr.core.space.field import ScalarField
from topcorr.core.space.partition import separating_function
from topcorr.core.space.region import Region, preimage_region

if TYPE_CHECKING:
    from collections.abc import Sequence

    from topcorr.core.cover.admissible import AdmissibleCover
    from topcorr.core.graph import TopGraph

_LOGGER = logging.getLogger(__name__)

EdgeFunction = Callable[[Point], Any]


class CorrUnitary(ABC):
    """A unitary ``X(E) -> X(F)`` evaluated pointwise on ``F1``."""

    @property
    @abstractmethod
    def source(self) -> TopGraph: ...

    @property
    @abstractmethod
    def target(self) -> TopGraph: ...

    @abstractmethod
    def value_at(self, x: EdgeFunction, a: Point) -> complex:
        """``Gamma(x)(a)`` for a function ``x`` on ``E1``."""

    @abstractmethod
    def base_map(self, v: Point) -> Point:
        """``tau``: ``E0 -> F0``."""

    @abstractmethod
    def base_inverse(self, q: Point) -> Point:
        """``tau^-1``: ``F0 -> E0``."""

    @abstractmethod
    def boundary_points(self) -> tuple[Point, ...]:
        """Points of ``F1`` where the branch formula changes."""

    def parts(self) -> tuple[CorrUnitary, ...]:
        return (self,)

    @property
    def flips(self) -> int:
        return sum(isinstance(p, FlipUnitary) for p in self.parts())

    def apply(self, x: CorrVector, per_segment: int | None = None) -> CorrVector:
        """
        ``Gamma(x)`` as a sampled field on ``F1``.

        Values are exact at vertices, branch boundaries and grid points
        and interpolated linearly in between.

        :param x: Vector on the source graph.
        :type x: CorrVector
        :param per_segment: Grid points per segment; defaults to the
            configured sampling resolution.
        :type per_segment: int | None
        :raises GraphMismatchError: If ``x`` lives on another graph.
        :return: The image vector.
        :rtype: CorrVector
        """
        if x.graph != self.source:
            msg = "vector does not live on the source graph of the unitary"
            raise GraphMismatchError(msg)
        anchors: dict[int, set] = {}
        for p in self.boundary_points():
            if p.segment is not None and p.t is not None:
                anchors.setdefault(p.segment, set()).add(p.t)
        field = ScalarField.sampled(
            self.target.edges,
            lambda a: self.value_at(x, a),
            per_segment or get_settings().samples_per_segment,
            anchors,
        )
        return CorrVector(self.target, field)


def _sheet_boundaries(cover: AdmissibleCover) -> list[Point]:
    out = []
    for region in cover.target_sets:
        out.extend(preimage_region(cover.target.s, region).boundary_points())
    return out


def _check_matching_pairs(cover: AdmissibleCover) -> tuple[dict, dict]:
    source, target = cover.source_permutations(), cover.target_permutations()
    if source.keys() != target.keys():
        extra = sorted(source.keys() ^ target.keys())
        msg = f"covers intersect differently at {extra}"
        raise PermutationMismatchError(msg)
    return source, target


class PullbackUnitary(CorrUnitary):
    """``Gamma(x) = x . gamma^-1`` with ``gamma`` glued from the charts."""

    def __init__(self, cover: AdmissibleCover) -> None:
        self.cover = cover

    @property
    def source(self) -> TopGraph:
        return self.cover.source

    @property
    def target(self) -> TopGraph:
        return self.cover.target

    def value_at(self, x: EdgeFunction, a: Point) -> complex:
        i = self.cover.chart_of(self.target.s(a))
        return complex(x(self.cover.gamma_inverse(i, a)))

    def base_map(self, v: Point) -> Point:
        return self.cover.tau(v)

    def base_inverse(self, q: Point) -> Point:
        return self.cover.tau_inverse(q)

    @cached_property
    def _boundary(self) -> tuple[Point, ...]:
        return sort_points(_sheet_boundaries(self.cover))

    def boundary_points(self) -> tuple[Point, ...]:
        return self._boundary


def gamma_identity(cover: AdmissibleCover) -> PullbackUnitary:
    """
    The global pullback unitary of a cover with matching permutations.

    :param cover: An admissible cover.
    :type cover: AdmissibleCover
    :raises PermutationMismatchError: Naming the first pair where the
        two sides permute sheets differently.
    :return: The unitary.
    :rtype: PullbackUnitary
    """
    source, target = _check_matching_pairs(cover)
    for key in sorted(source):
        if source[key] != target[key]:
            msg = (
                f"permutations differ at {key}: {source[key]} on the "
                f"source, {target[key]} on the target; flips are needed"
            )
            raise PermutationMismatchError(msg)
    _LOGGER.info("pullback unitary over %d sets", len(cover.sets))
    return PullbackUnitary(cover)


@dataclass(frozen=True)
class FlipSpec:
    """Pair ``(i0, j0)``, transposed sheets ``(k0, l0)`` and the top angle."""

    i0: int
    j0: int
    k0: int
    l0: int
    upper_angle: float = math.pi / 2


def check_flip_spec(cover: AdmissibleCover, spec: FlipSpec) -> None:
    """
    Require ``pi^E_{i0 j0} = pi^F_{i0 j0} . (k0 l0)`` and agreement elsewhere.

    :param cover: An admissible cover.
    :type cover: AdmissibleCover
    :param spec: The flip.
    :type spec: FlipSpec
    :raises FlipSpecError: If the permutation data does not fit.
    """
    try:
        source, target = _check_matching_pairs(cover)
    except PermutationMismatchError as exc:
        raise FlipSpecError(str(exc)) from exc
    key = (spec.i0, spec.j0)
    if key not in source:
        msg = f"sets {spec.i0} and {spec.j0} do not intersect"
        raise FlipSpecError(msg)
    size = cover.sheet_count(spec.i0)
    if not (0 <= spec.k0 < size and 0 <= spec.l0 < size) or (
        spec.k0 == spec.l0
    ):
        msg = f"({spec.k0} {spec.l0}) is not a transposition of {size} sheets"
        raise FlipSpecError(msg)
    swap = transposition(size, spec.k0, spec.l0)
    if source[key] != compose(target[key], swap):
        msg = (
            f"pi^E{key} = {source[key]} is not pi^F{key} = {target[key]} "
            f"composed with ({spec.k0} {spec.l0})"
        )
        raise FlipSpecError(msg)
    for other in sorted(source):
        if other in (key, key[::-1]):
            continue
        if source[other] != target[other]:
            msg = f"permutations also differ at {other}"
            raise FlipSpecError(msg)


class FlipUnitary(CorrUnitary):
    """
    The rotation unitary correcting one transposition.

    With ``h = g . s_F``: on ``A = V_{i0 k0} & V_{j0, pi(l0)}`` the value
    is ``cos h x(gamma_i^-1 a) + sin h x(gamma_j^-1 a)``; on
    ``B = V_{i0 l0} & V_{j0, pi(k0)}`` it is
    ``e^{2ih} (cos h x(gamma_i^-1 a) - sin h x(gamma_j^-1 a))``; elsewhere
    it is a pullback.  ``g`` is 0 off ``V_{j0}`` and ``upper_angle`` off
    ``V_{i0}``.
    """

    def __init__(self, cover: AdmissibleCover, spec: FlipSpec) -> None:
        check_flip_spec(cover, spec)
        self.cover = cover
        self.spec = spec
        v_i = cover.target_sets[spec.i0]
        v_j = cover.target_sets[spec.j0]
        self.separator = separating_function(
            cover.target.base, v_i.closure() - v_j, v_j.closure() - v_i,
        )
        perm = cover.source_permutations()[(spec.i0, spec.j0)]
        rows_i = cover.target_sheets[spec.i0]
        rows_j = cover.target_sheets[spec.j0]
        self.region_a: Region = rows_i[spec.k0] & rows_j[perm[spec.l0]]
        self.region_b: Region = rows_i[spec.l0] & rows_j[perm[spec.k0]]

    @property
    def source(self) -> TopGraph:
        return self.cover.source

    @property
    def target(self) -> TopGraph:
        return self.cover.target

    def angle(self, q: Point) -> float:
        """``g(q)`` on ``F0``."""
        return self.spec.upper_angle * (1 - float(self.separator(q)))

    def value_at(self, x: EdgeFunction, a: Point) -> complex:
        in_a, in_b = self.region_a.contains(a), self.region_b.contains(a)
        if not (in_a or in_b):
            i = self.cover.chart_of(self.target.s(a))
            return complex(x(self.cover.gamma_inverse(i, a)))
        h = self.angle(self.target.s(a))
        x_i = complex(x(self.cover.gamma_inverse(self.spec.i0, a)))
        x_j = complex(x(self.cover.gamma_inverse(self.spec.j0, a)))
        if in_a:
            return math.cos(h) * x_i + math.sin(h) * x_j
        return cmath.exp(2j * h) * (math.cos(h) * x_i - math.sin(h) * x_j)

    def base_map(self, v: Point) -> Point:
        return self.cover.tau(v)

    def base_inverse(self, q: Point) -> Point:
        return self.cover.tau_inverse(q)

    @cached_property
    def _boundary(self) -> tuple[Point, ...]:
        return sort_points([
            *_sheet_boundaries(self.cover),
            *self.region_a.boundary_points(),
            *self.region_b.boundary_points(),
        ])

    def boundary_points(self) -> tuple[Point, ...]:
        return self._boundary


def gamma_flip(cover: AdmissibleCover, spec: FlipSpec) -> FlipUnitary:
    """
    The flip unitary of a cover whose permutations differ by one transposition.

    :param cover: An admissible cover.
    :type cover: AdmissibleCover
    :param spec: Pair, transposition and top angle.
    :type spec: FlipSpec
    :raises FlipSpecError: If the permutation data does not fit the spec.
    :return: The unitary.
    :rtype: FlipUnitary
    """
    unitary = FlipUnitary(cover, spec)
    _LOGGER.info("flip unitary at (%d, %d) exchanging sheets %d, %d",
                 spec.i0, spec.j0, spec.k0, spec.l0)
    return unitary


class ComposedUnitary(CorrUnitary):
    """Steps applied left to right, evaluated lazily."""

    def __init__(self, steps: Sequence[CorrUnitary]) -> None:
        if not steps:
            msg = "a composite needs at least one step"
            raise ValueError(msg)
        for left, right in zip(steps, steps[1:], strict=False):
            if left.target.base != right.source.base:
                msg = "consecutive steps do not share a base space"
                raise GraphMismatchError(msg)
        self.steps = tuple(steps)

    @property
    def source(self) -> TopGraph:
        return self.steps[0].source

    @property
    def target(self) -> TopGraph:
        return self.steps[-1].target

    def value_at(self, x: EdgeFunction, a: Point) -> complex:
        fn = x
        for step in self.steps[:-1]:
            fn = _lifted(step, fn)
        return self.steps[-1].value_at(fn, a)

    def base_map(self, v: Point) -> Point:
        for step in self.steps:
            v = step.base_map(v)
        return v

    def base_inverse(self, q: Point) -> Point:
        for step in reversed(self.steps):
            q = step.base_inverse(q)
        return q

    def boundary_points(self) -> tuple[Point, ...]:
        return self.steps[-1].boundary_points()

    def parts(self) -> tuple[CorrUnitary, ...]:
        return tuple(p for step in self.steps for p in step.parts())


def _lifted(step: CorrUnitary, fn: EdgeFunction) -> EdgeFunction:
    return lambda a: step.value_at(fn, a)
