"""Local conjugacy of discrete graphs and transport along certificates."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass

import networkx as nx
import numpy as np
from networkx.algorithms import isomorphism

from topcorr.core.corr import CoefFn, CorrVector, ElementaryTensor, TensorVector
from topcorr.core.cover.certificate import (
    CertificatePiece,
    ConjugacyCertificate,
)
from topcorr.core.errors import CertificateError, NotDiscreteError
from topcorr.core.fock import (
    AlgebraElement,
    PathBasis,
    element_matrix,
    fock_basis,
)
from topcorr.core.graph import TopGraph
from topcorr.core.space.complex import Point
from topcorr.core.space.plmap import PLMap
from topcorr.core.space.region import Region

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class NotConjugate:
    """Verdict of a search that found no base bijection."""

    reason: str


def _require_discrete(*graphs: TopGraph) -> None:
    for graph in graphs:
        if not graph.is_discrete:
            msg = f"graph {graph.name!r} is not discrete"
            raise NotDiscreteError(msg)


def _vertex(point: Point) -> str:
    assert point.vertex is not None
    return point.vertex


def _count_graph(graph: TopGraph) -> nx.MultiDiGraph:
    """One arrow ``s(e) -> r(e)`` per edge."""
    out = nx.MultiDiGraph()
    out.add_nodes_from(graph.base.vertices)
    for e in graph.edges.vertices:
        out.add_edge(_vertex(graph.s(Point.at(e))),
                     _vertex(graph.r(Point.at(e))), key=e)
    return out


def _invariants(counts: nx.MultiDiGraph) -> Counter[tuple[int, int, int]]:
    """Multiset of (loops, in-degree, out-degree) over the vertices."""
    return Counter(
        (counts.number_of_edges(v, v), counts.in_degree(v),
         counts.out_degree(v))
        for v in counts.nodes
    )


def _fibers(graph: TopGraph) -> dict[tuple[str, str], list[str]]:
    """Edge ids keyed by ``(r(e), s(e))``, sorted."""
    out: dict[tuple[str, str], list[str]] = {}
    for e in sorted(graph.edges.vertices):
        key = (_vertex(graph.r(Point.at(e))), _vertex(graph.s(Point.at(e))))
        out.setdefault(key, []).append(e)
    return out


def _certificate(
    source: TopGraph,
    target: TopGraph,
    tau: dict[str, str],
) -> ConjugacyCertificate:
    """``tau`` with singleton pieces and a global fiber pairing."""
    fibers_e, fibers_f = _fibers(source), _fibers(target)
    pairing: dict[str, str] = {}
    for (v, w), edges in fibers_e.items():
        pairing.update(zip(edges, fibers_f[(tau[v], tau[w])], strict=True))
    gamma = PLMap.from_vertex_map(source.edges, target.edges, pairing)
    gamma_inverse = gamma.inverse()
    tau_map = PLMap.from_vertex_map(source.base, target.base, tau)
    return ConjugacyCertificate(
        tau=tau_map,
        tau_inverse=tau_map.inverse(),
        pieces=tuple(
            CertificatePiece(
                region=Region.from_parts(source.base, vertices=[v]),
                gamma=gamma,
                gamma_inverse=gamma_inverse,
            )
            for v in source.base.vertices
        ),
    )


def decide_local_conjugacy_discrete(
    source: TopGraph,
    target: TopGraph,
) -> ConjugacyCertificate | NotConjugate:
    """
    Decide local conjugacy of two discrete graphs.

    Singleton neighbourhoods make the fiber bijections free, so the
    graphs are locally conjugate exactly when some bijection ``tau`` of
    the vertices carries every count ``n_{v,w}`` to ``n_{tau v, tau w}``.
    Sizes and degree invariants are compared first; the identity is
    tried before the isomorphism search.

    :param source: The graph ``E``.
    :type source: TopGraph
    :param target: The graph ``F``.
    :type target: TopGraph
    :raises NotDiscreteError: If either graph has segments.
    :return: A certificate, or the negative verdict.
    :rtype: ConjugacyCertificate | NotConjugate
    """
    _require_discrete(source, target)
    counts_e, counts_f = _count_graph(source), _count_graph(target)
    if len(source.base.vertices) != len(target.base.vertices):
        return NotConjugate(reason="vertex counts differ")
    if len(source.edges.vertices) != len(target.edges.vertices):
        return NotConjugate(reason="edge counts differ")
    if _invariants(counts_e) != _invariants(counts_f):
        return NotConjugate(reason="loop and degree invariants differ")
    if set(source.base.vertices) == set(target.base.vertices) and all(
        counts_e.number_of_edges(v, w) == counts_f.number_of_edges(v, w)
        for v in counts_e.nodes for w in counts_e.nodes
    ):
        _LOGGER.debug("identity bijection matches all counts")
        tau = {v: v for v in source.base.vertices}
    else:
        matcher = isomorphism.MultiDiGraphMatcher(counts_e, counts_f)
        found = next(matcher.isomorphisms_iter(), None)
        if found is None:
            return NotConjugate(reason="no bijection preserves edge counts")
        tau = dict(found)
    _LOGGER.info("discrete graphs %r and %r are locally conjugate",
                 source.name, target.name)
    return _certificate(source, target, tau)


def _global_gamma(
    source: TopGraph,
    target: TopGraph,
    cert: ConjugacyCertificate,
) -> PLMap:
    """Glue the per-vertex intertwiners into one bijection ``E1 -> F1``."""
    pairing = {}
    for e in source.edges.vertices:
        v = source.s(Point.at(e))
        piece = next(
            (p for p in cert.pieces if p.region.contains(v)), None,
        )
        if piece is None:
            msg = f"no certificate piece contains {v}"
            raise CertificateError(msg)
        pairing[e] = _vertex(piece.gamma(Point.at(e)))
    return PLMap.from_vertex_map(source.edges, target.edges, pairing)


def transport_element(
    source: TopGraph,
    target: TopGraph,
    cert: ConjugacyCertificate,
    element: AlgebraElement,
) -> AlgebraElement:
    """
    Move an element of ``T(E)`` to ``T(F)``: ``f -> f.tau^-1``, ``x -> x.gamma^-1``.

    :param source: The discrete graph ``E``.
    :type source: TopGraph
    :param target: The discrete graph ``F``.
    :type target: TopGraph
    :param cert: A verified certificate.
    :type cert: ConjugacyCertificate
    :param element: Element on ``E``.
    :type element: AlgebraElement
    :raises NotDiscreteError: If either graph has segments.
    :return: The transported element.
    :rtype: AlgebraElement
    """
    _require_discrete(source, target)
    gamma_inverse = _global_gamma(source, target, cert).inverse()

    def vector(x: CorrVector) -> CorrVector:
        return CorrVector(target, x.field.pullback(gamma_inverse))

    coefficient = None
    if element.coefficient is not None:
        coefficient = CoefFn(
            target, element.coefficient.field.pullback(cert.tau_inverse),
        )
    tensors = tuple(
        TensorVector(
            target, u.degree,
            tuple(
                ElementaryTensor(term.coefficient,
                                 tuple(vector(x) for x in term.factors))
                for term in u.terms
            ),
        )
        for u in element.tensors
    )
    return AlgebraElement(target, coefficient, tensors)


def path_bijection(
    cert: ConjugacyCertificate,
    gamma: PLMap,
    basis_e: PathBasis,
    basis_f: PathBasis,
) -> dict[int, int]:
    """
    Basis indices of ``E`` paths to those of their images in ``F``.

    :param cert: The certificate.
    :type cert: ConjugacyCertificate
    :param gamma: The glued edge bijection.
    :type gamma: PLMap
    :param basis_e: Path basis of ``E``.
    :type basis_e: PathBasis
    :param basis_f: Path basis of ``F`` with the same depth.
    :type basis_f: PathBasis
    :return: Index map.
    :rtype: dict[int, int]
    """
    out = {}
    for index, (degree, path) in enumerate(basis_e.paths):
        if degree == 0:
            image = (_vertex(cert.tau(Point.at(path[0]))),)
        else:
            image = tuple(_vertex(gamma(Point.at(e))) for e in path)
        out[index] = basis_f.index[(degree, image)]
    return out


def fock_intertwines(
    source: TopGraph,
    target: TopGraph,
    cert: ConjugacyCertificate,
    element: AlgebraElement,
    depth: int,
) -> float:
    """
    Largest entry of ``P M_E P^T - M_F`` on the truncated Fock spaces.

    ``P`` is the permutation matrix of :func:`path_bijection` and
    ``M_F`` the matrix of the transported element.

    :param source: The discrete graph ``E``.
    :type source: TopGraph
    :param target: The discrete graph ``F``.
    :type target: TopGraph
    :param cert: A verified certificate.
    :type cert: ConjugacyCertificate
    :param element: Element on ``E``.
    :type element: AlgebraElement
    :param depth: Truncation depth.
    :type depth: int
    :return: The deviation, 0 for an exact intertwining.
    :rtype: float
    """
    basis_e, basis_f = fock_basis(source, depth), fock_basis(target, depth)
    gamma = _global_gamma(source, target, cert)
    mapping = path_bijection(cert, gamma, basis_e, basis_f)
    perm = np.zeros((basis_f.dimension, basis_e.dimension), dtype=complex)
    for col, row in mapping.items():
        perm[row, col] = 1
    m_e = element_matrix(element, basis_e)
    m_f = element_matrix(
        transport_element(source, target, cert, element), basis_f,
    )
    return float(np.abs(perm @ m_e @ perm.T - m_f).max(initial=0.0))
