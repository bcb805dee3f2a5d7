"""Covers, partitions of unity, threshold sets and separating functions."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from typing import TYPE_CHECKING

from topcorr.core.constants import MAX_REFINEMENT_ROUNDS
from topcorr.core.errors import BudgetExceededError, CoverError
from topcorr.core.space.complex import ONE, ZERO, Complex1, Point
from topcorr.core.space.field import ScalarField, poly_solve
from topcorr.core.space.knots import KnotSet
from topcorr.core.space.region import Region

if TYPE_CHECKING:
    from collections.abc import Sequence

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cover:
    """An ordered family of regions of one complex."""

    complex: Complex1
    sets: tuple[Region, ...]

    @classmethod
    def of(cls, space: Complex1, sets: Sequence[Region]) -> Cover:
        return cls(complex=space, sets=tuple(sets))

    def union(self) -> Region:
        out = Region.empty(self.complex)
        for region in self.sets:
            out = out | region
        return out

    def uncovered_point(self) -> Point | None:
        """A point missed by every set, or None."""
        return self.union().complement().sample_point()

    def require_covering(self) -> None:
        """
        Raise unless the sets cover the complex.

        :raises CoverError: With an uncovered point.
        """
        missing = self.uncovered_point()
        if missing is not None:
            msg = f"point {missing} is not covered"
            raise CoverError(msg)


def _members(knots: KnotSet, cover: Cover) -> dict[Point, tuple[int, ...]]:
    """Indices of sets containing the closed star of every knot."""
    table = {}
    for u in knots.points():
        closed = knots.closed_star(u)
        table[u] = tuple(
            i for i, region in enumerate(cover.sets)
            if closed.issubset(region)
        )
    return table


def partition_of_unity(cover: Cover) -> list[ScalarField]:
    """
    Piecewise-linear partition of unity subordinate to a cover.

    Knots start at the vertices and all set endpoints.  A knot whose
    closed star fits in no set is bisected around until it does; then
    ``f_i`` takes the value ``1/|J(u)|`` at every knot ``u`` whose
    closed star lies in ``U_i`` (``J(u)`` being all such ``i``) and
    interpolates linearly.

    :param cover: An open cover.
    :type cover: Cover
    :raises CoverError: If the sets do not cover the complex.
    :raises BudgetExceededError: If refinement does not settle.
    :return: One field per set, in cover order.
    :rtype: list[ScalarField]
    """
    cover.require_covering()
    space = cover.complex
    knots = KnotSet.trivial(space).with_points(
        Point.on(j, t)
        for region in cover.sets
        for j, ts in region.all_cuts().items()
        for t in ts
    )
    for rounds in range(MAX_REFINEMENT_ROUNDS + 1):
        members = _members(knots, cover)
        failing = [u for u, js in members.items() if not js]
        if not failing:
            _LOGGER.debug("partition settled after %d rounds, %d knots",
                          rounds, knots.size())
            break
        knots = knots.bisect_around(failing)
    else:
        msg = (
            f"partition of unity did not settle in {MAX_REFINEMENT_ROUNDS}"
            " refinement rounds"
        )
        raise BudgetExceededError(msg)
    fields = []
    for i in range(len(cover.sets)):
        def value(u: Point, i: int = i) -> Fraction:
            js = members[u]
            return Fraction(1, len(js)) if i in js else ZERO

        fields.append(
            ScalarField.piecewise_linear(
                space,
                {v: value(Point.at(v)) for v in space.vertices},
                {
                    j: {t: value(Point.on(j, t)) for t in ts}
                    for j, ts in enumerate(knots.interior)
                },
            ),
        )
    return fields


class Direction(StrEnum):
    """Which side of the level a threshold set keeps."""

    ABOVE = "above"
    BELOW = "below"
    BAND = "band"


def threshold_set(
    f: ScalarField,
    level: Fraction,
    direction: Direction = Direction.ABOVE,
    upper: Fraction | None = None,
) -> Region:
    """
    Exact superlevel, sublevel or band set of a real field.

    :param f: Real-valued field.
    :type f: ScalarField
    :param level: The level (lower level of a band).
    :type level: Fraction
    :param direction: Above, below or band.
    :type direction: Direction
    :param upper: Upper level of a band.
    :type upper: Fraction | None
    :raises ValueError: If a band has no upper level.
    :return: ``{f > level}``, ``{f < level}`` or ``{level < f < upper}``.
    :rtype: Region
    """
    if direction is Direction.BAND and upper is None:
        msg = "band threshold needs an upper level"
        raise ValueError(msg)
    levels = [level] if upper is None else [level, upper]

    def member(point: Point) -> bool:
        value = f(point)
        if direction is Direction.ABOVE:
            return bool(value > level)
        if direction is Direction.BELOW:
            return bool(value < level)
        assert upper is not None
        return bool(level < value < upper)

    cuts: dict[int, set[Fraction]] = {}
    for j, seg in enumerate(f.segments):
        found = set(seg.knots)
        for k, poly in enumerate(seg.pieces):
            for c in levels:
                found.update(poly_solve(poly, c, seg.knots[k],
                                        seg.knots[k + 1]))
        cuts[j] = found
    return Region.from_cells(f.complex, member, cuts)


def level_set(f: ScalarField, level: Fraction) -> Region:
    """``{f = level}`` as the complement of the two strict sides."""
    above = threshold_set(f, level, Direction.ABOVE)
    below = threshold_set(f, level, Direction.BELOW)
    return (above | below).complement()


def separating_function(
    space: Complex1,
    one_on: Region,
    zero_on: Region,
) -> ScalarField:
    """
    A PL function in ``[0, 1]`` equal to 1 on one closed set and 0 on another.

    Built from the partition of unity of the two-set cover by the
    complements of the closed sets.

    :param space: The complex.
    :type space: Complex1
    :param one_on: Closed region where the function is 1.
    :type one_on: Region
    :param zero_on: Closed region, disjoint from ``one_on``, where it is 0.
    :type zero_on: Region
    :raises CoverError: If the two regions meet.
    :return: The separating function.
    :rtype: ScalarField
    """
    if zero_on.is_empty():
        return ScalarField.constant(space, ONE)
    if one_on.is_empty():
        return ScalarField.constant(space, ZERO)
    common = (one_on & zero_on).sample_point()
    if common is not None:
        msg = f"cannot separate regions meeting at {common}"
        raise CoverError(msg)
    f_one, _ = partition_of_unity(
        Cover.of(space, [zero_on.complement(), one_on.complement()]),
    )
    return f_one
