"""Intermediate graphs: regluing two sheets across one overlap."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from topcorr.core.constants import CUT_LEVEL_CANDIDATES
from topcorr.core.cover.admissible import AdmissibleCover, Sheets, point_over
from topcorr.core.errors import AgreementError, CoverError
from topcorr.core.graph import TopGraph
from topcorr.core.space.complex import Germ, Point, Segment
from topcorr.core.space.partition import (
    Direction,
    level_set,
    separating_function,
    threshold_set,
)
from topcorr.core.space.plmap import PLMap
from topcorr.core.space.region import Region, preimage_region, subdivide_region

if TYPE_CHECKING:
    from collections.abc import Sequence

    from topcorr.core.space.field import ScalarField

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Regluing:
    """
    A regluing step.

    ``cover`` is the cover of the new graph against the old target;
    ``step`` relates old and new graph over the identity of ``E0``.
    """

    graph: TopGraph
    cover: AdmissibleCover
    step: AdmissibleCover


def step_cover(
    cover: AdmissibleCover,
    graph: TopGraph,
    sheets: Sequence[Sheets],
) -> AdmissibleCover:
    """Cover of ``cover.source`` against ``graph`` with ``tau = id``."""
    identity = PLMap.identity(cover.source.base)
    return AdmissibleCover(
        source=cover.source,
        target=graph,
        tau=identity,
        tau_inverse=identity,
        sets=cover.sets,
        sheets=cover.sheets,
        target_sets=cover.sets,
        target_sheets=tuple(sheets),
        metadata={"step": True},
    )


def cut_level(f: ScalarField) -> Fraction:
    """
    First candidate level that is not a knot value of ``f``.

    :param f: A PL field.
    :type f: ScalarField
    :raises CoverError: If every candidate is a knot value.
    :return: The level.
    :rtype: Fraction
    """
    values = set(f.knot_values())
    for level in CUT_LEVEL_CANDIDATES:
        if level not in values:
            return level
    msg = "every candidate cut level is a knot value"
    raise CoverError(msg)


def _exchange(
    sheets: Sheets,
    a: int,
    b: int,
    keep: Region,
    move: Region,
) -> list[Region]:
    out = list(sheets)
    out[a] = (sheets[a] & keep) | (sheets[b] & move)
    out[b] = (sheets[b] & keep) | (sheets[a] & move)
    return out


def _vertex(point: Point) -> str:
    assert point.vertex is not None
    return point.vertex


def _germ_key(germ: Germ) -> tuple[int, int]:
    """The segment end ``(segment, 0 | 1)`` a vertex germ leaves through."""
    return germ.segment, 0 if germ.sign > 0 else 1


def intermediate_graph(
    graph: TopGraph,
    cover: AdmissibleCover,
    pair: tuple[int, int],
    swap: tuple[int, int],
) -> Regluing:
    """
    Reglue sheets ``k`` and ``k'`` of ``U_i`` across the overlap with ``U_j``.

    A separating function ``f`` (1 off ``U_j``, 0 off ``U_i``) is cut at
    a level that is not one of its knot values.  Over every crossing
    ``z`` the edge space is cut at the two points ``a, b`` of the sheets,
    and the ends leaving towards ``f < level`` are exchanged between
    ``a`` and ``b``.  The result has ``pi_{i,j}`` composed with the
    transposition and every other permutation unchanged.

    :param graph: The graph ``E``, the source of ``cover``.
    :type graph: TopGraph
    :param cover: An admissible cover of ``E``.
    :type cover: AdmissibleCover
    :param pair: ``(i, j)`` with ``U_i`` meeting ``U_j``.
    :type pair: tuple[int, int]
    :param swap: The sheets ``(k, k')`` of ``U_i`` to exchange.
    :type swap: tuple[int, int]
    :raises AgreementError: If ``r`` differs at the two points of a
        crossing.
    :raises CoverError: If an overlap component never reaches the level.
    :return: The new graph with its covers.
    :rtype: Regluing
    """
    i, j = pair
    k, k2 = swap
    if k == k2:
        return Regluing(graph=graph, cover=cover,
                        step=step_cover(cover, graph, cover.sheets))
    s, r = graph.s, graph.r
    u_i, u_j = cover.sets[i], cover.sets[j]
    f = separating_function(graph.base, u_i.closure() - u_j,
                            u_j.closure() - u_i)
    level = cut_level(f)
    crossing_set = level_set(f, level) & u_i & u_j
    for comp in (u_i & u_j).components():
        if (crossing_set & comp).is_empty():
            msg = f"overlap component {comp} does not reach level {level}"
            raise CoverError(msg)
    ends = []
    for z in crossing_set.finite_points():
        a = point_over(s, cover.sheets[i][k], z)
        b = point_over(s, cover.sheets[i][k2], z)
        if r(a) != r(b):
            msg = f"r({a}) = {r(a)} differs from r({b}) = {r(b)} over {z}"
            raise AgreementError(msg)
        ends.append((a, b))
    cuts: dict[int, set[Fraction]] = defaultdict(set)
    for point in (p for both in ends for p in both):
        if point.segment is not None and point.t is not None:
            cuts[point.segment].add(point.t)
    sub = graph.edges.subdivide(cuts)
    s_sub = s.subdivide_source(sub)
    moves: dict[tuple[int, int], str] = {}
    for a, b in ends:
        va, vb = _vertex(sub.forward(a)), _vertex(sub.forward(b))
        for this, other in ((va, vb), (vb, va)):
            for germ in sub.new.germs(Point.at(this)):
                image = s_sub.germ_image(germ)
                assert image is not None
                if f.slope_at(image.segment, image.t) * image.sign < 0:
                    moves[_germ_key(germ)] = other
    segments = list(sub.new.segments)
    for (seg, end), vertex in moves.items():
        old = segments[seg]
        segments[seg] = (Segment(vertex, old.end) if end == 0
                         else Segment(old.start, vertex))
    edges = sub.new.with_segments(segments)
    new_graph = TopGraph(
        base=graph.base,
        edges=edges,
        range_map=r.subdivide_source(sub).rebased(edges),
        source_map=s_sub.rebased(edges),
        name=f"{graph.name}~{i}.{j}:{k}.{k2}",
    ).require_valid()

    below = preimage_region(s, threshold_set(f, level, Direction.BELOW))
    above = below.complement()
    perm = cover.source_permutations()[(i, j)]
    rows = [list(row) for row in cover.sheets]
    rows[i] = _exchange(cover.sheets[i], k, k2, keep=above, move=below)
    rows[j] = _exchange(cover.sheets[j], perm[k], perm[k2], keep=below,
                        move=above)
    sheets = tuple(
        tuple(subdivide_region(sheet, sub).rebind(edges) for sheet in row)
        for row in rows
    )
    _LOGGER.info("reglued sheets %d, %d of set %d at %d crossings", k, k2, i,
                 len(ends))
    return Regluing(
        graph=new_graph,
        cover=cover.with_source(new_graph, sheets),
        step=step_cover(cover, new_graph, sheets),
    )
