"""Sheet permutation data of covers and their transposition factorizations."""

from __future__ import annotations

from itertools import combinations
from typing import TYPE_CHECKING

from topcorr.core.errors import CoverError, PermutationMismatchError

if TYPE_CHECKING:
    from collections.abc import Sequence

    from topcorr.core.space.region import Region

Permutation = tuple[int, ...]
PermutationData = dict[tuple[int, int], Permutation]


def invert(p: Permutation) -> Permutation:
    out = [0] * len(p)
    for k, image in enumerate(p):
        out[image] = k
    return tuple(out)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """``p . q``: apply ``q`` first."""
    return tuple(p[image] for image in q)


def is_identity(p: Permutation) -> bool:
    return all(k == image for k, image in enumerate(p))


def transposition(size: int, a: int, b: int) -> Permutation:
    out = list(range(size))
    out[a], out[b] = b, a
    return tuple(out)


def sheet_matching(
    sheets_i: Sequence[Region],
    sheets_j: Sequence[Region],
) -> list[list[int]]:
    """For every sheet of ``U_i``, the sheets of ``U_j`` it meets."""
    return [
        [m for m, other in enumerate(sheets_j)
         if not (sheet & other).is_empty()]
        for sheet in sheets_i
    ]


def permutation_data(
    sets: Sequence[Region],
    sheets: Sequence[Sequence[Region]],
) -> PermutationData:
    """
    The permutations ``pi_{i,j}`` of one side of a cover.

    ``pi_{i,j}(k) = l`` exactly when ``U_ik`` meets ``U_jl``; entries
    exist for both orders of every intersecting pair.

    :param sets: The sets ``U_i``.
    :type sets: Sequence[Region]
    :param sheets: The sheets ``U_ik`` per set.
    :type sheets: Sequence[Sequence[Region]]
    :raises CoverError: If some sheet meets zero or several sheets, or
        the matching is not a bijection.
    :return: Zero-based permutations keyed by ``(i, j)``.
    :rtype: PermutationData
    """
    out: PermutationData = {}
    for i, j in combinations(range(len(sets)), 2):
        if (sets[i] & sets[j]).is_empty():
            continue
        perm = []
        for k, ls in enumerate(sheet_matching(sheets[i], sheets[j])):
            if len(ls) != 1:
                msg = f"sheet {k} of set {i} meets sheets {ls} of set {j}"
                raise CoverError(msg)
            perm.append(ls[0])
        if sorted(perm) != list(range(len(sheets[j]))):
            msg = f"sheets of sets {i} and {j} are not matched bijectively"
            raise CoverError(msg)
        out[(i, j)] = tuple(perm)
        out[(j, i)] = invert(tuple(perm))
    return out


def sigma_data(
    source: PermutationData,
    target: PermutationData,
) -> PermutationData:
    """
    Defects ``sigma_{i,j} = (pi^F_{i,j})^-1 . pi^E_{i,j}``.

    :param source: Permutation data of the ``E`` side.
    :type source: PermutationData
    :param target: Permutation data of the ``F`` side.
    :type target: PermutationData
    :raises PermutationMismatchError: If the sides intersect differently.
    :return: The defect per pair.
    :rtype: PermutationData
    """
    if source.keys() != target.keys():
        extra = sorted(source.keys() ^ target.keys())
        msg = f"permutation data defined on different pairs: {extra}"
        raise PermutationMismatchError(msg)
    return {
        key: compose(invert(target[key]), perm)
        for key, perm in source.items()
    }


def transpositions(p: Permutation) -> list[tuple[int, int]]:
    """
    Factor ``p`` as ``t1 . t2 . ... . tn``.

    Each cycle ``(c0 c1 ... c_{L-1})`` is written as
    ``(c0 c_{L-1}) . ... . (c0 c1)``, so every factor moves two sheets
    of the same cycle and the count is ``sum(L - 1)``.

    :param p: A permutation.
    :type p: Permutation
    :return: The transpositions in composition order.
    :rtype: list[tuple[int, int]]
    """
    seen: set[int] = set()
    out: list[tuple[int, int]] = []
    for start in range(len(p)):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        k = p[start]
        while k != start:
            cycle.append(k)
            seen.add(k)
            k = p[k]
        out.extend((cycle[0], cycle[m]) for m in range(len(cycle) - 1, 0, -1))
    return out
