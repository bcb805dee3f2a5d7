"""The full equivalence: flips through intermediate graphs, then a pullback."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from topcorr.core.cover.admissible import AdmissibleCover, build_admissible_cover
from topcorr.core.cover.certificate import ConjugacyCertificate
from topcorr.core.cover.permutations import (
    PermutationData,
    invert,
    sigma_data,
    transpositions,
)
from topcorr.core.equiv.regluing import intermediate_graph
from topcorr.core.equiv.unitary import (
    ComposedUnitary,
    CorrUnitary,
    FlipSpec,
    gamma_flip,
    gamma_identity,
)
from topcorr.core.graph import TopGraph

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EquivalenceChain:
    """Cover, defects, intermediate graphs and the unitary steps.

    ``final_cover`` relates the last intermediate graph to ``F``.
    """

    cover: AdmissibleCover
    sigma: PermutationData
    graphs: tuple[TopGraph, ...]
    steps: tuple[CorrUnitary, ...]
    final_cover: AdmissibleCover

    @property
    def unitary(self) -> ComposedUnitary:
        return ComposedUnitary(self.steps)

    @property
    def flips(self) -> int:
        return len(self.steps) - 1


def full_equivalence(
    source: TopGraph,
    target: TopGraph,
    cert: ConjugacyCertificate,
) -> EquivalenceChain:
    """
    Build the unitary ``X(E) -> X(F)`` of a local conjugacy.

    Every defect ``sigma_{i,j}`` (pairs ``i < j`` in lexicographic
    order) is undone one transposition at a time: each regluing yields
    an intermediate graph and a flip unitary onto it.  Once the
    permutation data agree, a pullback finishes the chain.

    :param source: The graph ``E``.
    :type source: TopGraph
    :param target: The graph ``F``.
    :type target: TopGraph
    :param cert: A certificate of ``E`` against ``F``.
    :type cert: ConjugacyCertificate
    :return: The chain of steps.
    :rtype: EquivalenceChain
    """
    cover = build_admissible_cover(source, target, cert)
    sigma = sigma_data(cover.source_permutations(),
                       cover.target_permutations())
    graphs = [source]
    steps: list[CorrUnitary] = []
    current = cover
    for i, j in sorted(key for key in sigma if key[0] < key[1]):
        for k, k2 in transpositions(invert(sigma[(i, j)])):
            _LOGGER.debug("pair (%d, %d): transposing sheets %d, %d",
                          i, j, k, k2)
            step = intermediate_graph(current.source, current, (i, j),
                                      (k, k2))
            steps.append(gamma_flip(step.step, FlipSpec(i, j, k, k2)))
            graphs.append(step.graph)
            current = step.cover
    steps.append(gamma_identity(current))
    _LOGGER.info("equivalence chain with %d flips over %d sets",
                 len(steps) - 1, len(cover.sets))
    return EquivalenceChain(cover=cover, sigma=sigma, graphs=tuple(graphs),
                            steps=tuple(steps), final_cover=current)
