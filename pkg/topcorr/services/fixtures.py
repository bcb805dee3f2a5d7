"""Module holding the canonical fixture corpus and writing it to disk."""

from __future__ import annotations

import logging
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import TYPE_CHECKING

from topcorr.core.cover.certificate import (
    CertificatePiece,
    ConjugacyCertificate,
)
from topcorr.core.graph import TopGraph, copy_vertex, from_dynamical_system
from topcorr.core.space.complex import Complex1, Point
from topcorr.core.space.plmap import Piece, PLMap, SegmentImage
from topcorr.core.space.region import Interval, Region
from topcorr.services.serialization import (
    certificate_to_json,
    graph_to_json,
    write_json,
)

if TYPE_CHECKING:
    from collections.abc import Callable, Mapping, Sequence

_LOGGER = logging.getLogger(__name__)

UNIT_VERTICES = ("0", "1/3", "2/3", "1")


# -- spaces and maps --------------------------------------------------


@lru_cache(maxsize=1)
def unit_interval() -> Complex1:
    """``[0, 1]`` with vertices at thirds."""
    return Complex1.build(UNIT_VERTICES,
                          [("0", "1/3"), ("1/3", "2/3"), ("2/3", "1")])


@lru_cache(maxsize=1)
def circle() -> Complex1:
    """A circle made of three segments."""
    return Complex1.build(["0", "1/3", "2/3"],
                          [("0", "1/3"), ("1/3", "2/3"), ("2/3", "0")])


def self_map(
    space: Complex1,
    vertex_images: Mapping[str, str],
    pieces: Sequence[Piece],
) -> PLMap:
    """A self-map with one piece per segment."""
    return PLMap(
        source=space,
        target=space,
        vertex_images={v: Point.at(w) for v, w in vertex_images.items()},
        segment_images=tuple(SegmentImage.single(p) for p in pieces),
    )


def _unit(images: Sequence[str], pieces: Sequence[Piece]) -> PLMap:
    return self_map(unit_interval(), dict(zip(UNIT_VERTICES, images,
                                              strict=True)), pieces)


def clamp_map() -> PLMap:
    """``t -> clamp(t, 1/3, 2/3)``."""
    return _unit(["1/3", "1/3", "2/3", "2/3"],
                 [Piece.constant("1/3"), Piece.affine(1, 0, 1),
                  Piece.constant("2/3")])


def min_map() -> PLMap:
    """``t -> min(t, 2/3)``."""
    return _unit(["0", "1/3", "2/3", "2/3"],
                 [Piece.affine(0, 0, 1), Piece.affine(1, 0, 1),
                  Piece.constant("2/3")])


def max_map() -> PLMap:
    """``t -> max(t, 1/3)``."""
    return _unit(["1/3", "1/3", "2/3", "1"],
                 [Piece.constant("1/3"), Piece.affine(1, 0, 1),
                  Piece.affine(2, 0, 1)])


def fold_map() -> PLMap:
    """Identity on the middle third, folded back onto it at both ends."""
    return _unit(["2/3", "1/3", "2/3", "1/3"],
                 [Piece.affine(1, 1, 0), Piece.affine(1, 0, 1),
                  Piece.affine(1, 1, 0)])


@lru_cache(maxsize=1)
def single_segment() -> Complex1:
    """``[0, 1]`` as one segment."""
    return Complex1.build(["0", "1"], [("0", "1")])


def tent_map() -> PLMap:
    """``t -> |2t - 1|`` on a single segment."""
    return PLMap(
        source=single_segment(),
        target=single_segment(),
        vertex_images={"0": Point.at("1"), "1": Point.at("1")},
        segment_images=(SegmentImage.build(
            [Fraction(1, 2)], [Piece.affine(0, 1, 0), Piece.affine(0, 0, 1)],
        ),),
    )


def right_fold_map() -> PLMap:
    """Identity on ``[0, 2/3]``, folded back on ``[2/3, 1]``."""
    return _unit(["0", "1/3", "2/3", "1/3"],
                 [Piece.affine(0, 0, 1), Piece.affine(1, 0, 1),
                  Piece.affine(1, 1, 0)])


def left_fold_map() -> PLMap:
    """Folded back on ``[0, 1/3]``, constant ``2/3`` on ``[2/3, 1]``."""
    return _unit(["2/3", "1/3", "2/3", "2/3"],
                 [Piece.affine(1, 1, 0), Piece.affine(1, 0, 1),
                  Piece.constant("2/3")])


def rotation_map() -> PLMap:
    """Rotation of the circle by a third."""
    space = circle()
    return self_map(space, {"0": "1/3", "1/3": "2/3", "2/3": "0"},
                    [Piece.affine((j + 1) % 3, 0, 1) for j in range(3)])


def copy_permutation(
    space: Complex1,
    copies: int,
    perm: Mapping[int, int],
) -> PLMap:
    """
    Homeomorphism of ``{1..n} x X`` sending copy ``k`` to copy ``perm[k]``.

    :param space: The space ``X``.
    :type space: Complex1
    :param copies: Number of copies ``n``.
    :type copies: int
    :param perm: Copy permutation, 1-based; missing copies are fixed.
    :type perm: Mapping[int, int]
    :return: The map, on the edge space built by
        :func:`from_dynamical_system`.
    :rtype: PLMap
    """
    edges = Complex1.build(
        [copy_vertex(k, v) for k in range(1, copies + 1)
         for v in space.vertices],
        [(copy_vertex(k, seg.start), copy_vertex(k, seg.end))
         for k in range(1, copies + 1) for seg in space.segments],
    )
    width = len(space.segments)
    return PLMap(
        source=edges,
        target=edges,
        vertex_images={
            copy_vertex(k, v): Point.at(copy_vertex(perm.get(k, k), v))
            for k in range(1, copies + 1) for v in space.vertices
        },
        segment_images=tuple(
            SegmentImage.single(
                Piece.affine((perm.get(k, k) - 1) * width + j, 0, 1),
            )
            for k in range(1, copies + 1) for j in range(width)
        ),
    )


def _copy_certificate(
    source: TopGraph,
    copies: int,
    pieces: Sequence[tuple[Region, Mapping[int, int]]],
) -> ConjugacyCertificate:
    identity = PLMap.identity(source.base)
    out = []
    for region, perm in pieces:
        inverse = {v: k for k, v in perm.items()}
        out.append(
            CertificatePiece(
                region=region,
                gamma=copy_permutation(source.base, copies, perm),
                gamma_inverse=copy_permutation(source.base, copies, inverse),
            ),
        )
    return ConjugacyCertificate(tau=identity, tau_inverse=identity,
                                pieces=tuple(out))


def lower_part() -> Region:
    """``[0, 2/3)`` of the unit interval."""
    return Region.from_parts(
        unit_interval(), ["0", "1/3"],
        {0: [Interval(Fraction(0), Fraction(1))],
         1: [Interval(Fraction(0), Fraction(1))]},
    )


def upper_part() -> Region:
    """``(1/3, 1]`` of the unit interval."""
    return Region.from_parts(
        unit_interval(), ["2/3", "1"],
        {1: [Interval(Fraction(0), Fraction(1))],
         2: [Interval(Fraction(0), Fraction(1))]},
    )


# -- discrete graphs --------------------------------------------------


def discrete_graph(
    name: str,
    vertices: Sequence[str],
    edges: Mapping[str, tuple[str, str]],
) -> TopGraph:
    """
    A graph over finite sets.

    :param name: Graph name.
    :type name: str
    :param vertices: Base vertex ids.
    :type vertices: Sequence[str]
    :param edges: ``edge -> (s(edge), r(edge))``.
    :type edges: Mapping[str, tuple[str, str]]
    :return: The validated graph.
    :rtype: TopGraph
    """
    base = Complex1.build(vertices)
    edge_space = Complex1.build(edges)
    return TopGraph(
        base=base,
        edges=edge_space,
        range_map=PLMap.from_vertex_map(
            edge_space, base, {e: sr[1] for e, sr in edges.items()}),
        source_map=PLMap.from_vertex_map(
            edge_space, base, {e: sr[0] for e, sr in edges.items()}),
        name=name,
    ).require_valid()


def d1() -> TopGraph:
    """Loop ``e1`` at ``a``, ``e2: a -> b`` and ``e3: b -> a``."""
    return discrete_graph("D1", ["a", "b"], {
        "e1": ("a", "a"), "e2": ("a", "b"), "e3": ("b", "a"),
    })


def d1_plus() -> TopGraph:
    """D1 with an extra loop at ``b``."""
    return discrete_graph("D1plus", ["a", "b"], {
        "e1": ("a", "a"), "e2": ("a", "b"), "e3": ("b", "a"),
        "e4": ("b", "b"),
    })


def d1_relabeled() -> TopGraph:
    """D1 with ``a`` and ``b`` exchanged."""
    return discrete_graph("D1relabeled", ["a", "b"], {
        "e1": ("b", "b"), "e2": ("b", "a"), "e3": ("a", "b"),
    })


def swap2() -> TopGraph:
    """Two points with the identity and the swap."""
    space = Complex1.build(["p", "q"])
    return from_dynamical_system(space, [
        PLMap.identity(space),
        PLMap.from_vertex_map(space, space, {"p": "q", "q": "p"}),
    ], name="SWAP2")


# -- PL systems -------------------------------------------------------


def dkflip_e() -> TopGraph:
    """``id`` and ``clamp(t, 1/3, 2/3)`` on ``[0, 1]``."""
    return from_dynamical_system(
        unit_interval(), [PLMap.identity(unit_interval()), clamp_map()],
        name="DKFLIP_E",
    )


def dkflip_f() -> TopGraph:
    """``min(t, 2/3)`` and ``max(t, 1/3)`` on ``[0, 1]``."""
    return from_dynamical_system(unit_interval(), [min_map(), max_map()],
                                 name="DKFLIP_F")


def dkflip_certificate(*, swapped: bool = True) -> ConjugacyCertificate:
    """
    Identity pairing over ``[0, 2/3)``, swapped pairing over ``(1/3, 1]``.

    :param swapped: ``False`` keeps the identity pairing over the upper
        part, which breaks the range intertwining there.
    :type swapped: bool
    :return: The certificate of DKFLIP_E against DKFLIP_F.
    :rtype: ConjugacyCertificate
    """
    upper = {1: 2, 2: 1} if swapped else {}
    return _copy_certificate(dkflip_e(), 2,
                             [(lower_part(), {}), (upper_part(), upper)])


def cycle3_e() -> TopGraph:
    """``id``, ``clamp`` and the double fold on ``[0, 1]``."""
    return from_dynamical_system(
        unit_interval(),
        [PLMap.identity(unit_interval()), clamp_map(), fold_map()],
        name="CYCLE3_E",
    )


def cycle3_f() -> TopGraph:
    """The maps of CYCLE3_E reshuffled cyclically over the upper part."""
    return from_dynamical_system(
        unit_interval(), [right_fold_map(), max_map(), left_fold_map()],
        name="CYCLE3_F",
    )


def cycle3_certificate() -> ConjugacyCertificate:
    """Identity pairing below, copies rotated ``1 -> 2 -> 3 -> 1`` above."""
    return _copy_certificate(
        cycle3_e(), 3,
        [(lower_part(), {}), (upper_part(), {1: 2, 2: 3, 3: 1})],
    )


_OUTER_BRANCHES = {
    "left": {
        "id": ("0", Piece.affine(0, 0, 1)),
        "clamp": ("1/3", Piece.constant("1/3")),
        "fold": ("2/3", Piece.affine(1, 1, 0)),
    },
    "right": {
        "id": ("1", Piece.affine(2, 0, 1)),
        "clamp": ("2/3", Piece.constant("2/3")),
        "fold": ("1/3", Piece.affine(1, 1, 0)),
    },
}


def branch_map(left: str, right: str) -> PLMap:
    """
    Identity on the middle third with a chosen shape on each outer third.

    :param left: ``"id"``, ``"clamp"`` or ``"fold"`` on ``[0, 1/3]``.
    :type left: str
    :param right: ``"id"``, ``"clamp"`` or ``"fold"`` on ``[2/3, 1]``.
    :type right: str
    :return: The self-map of the unit interval.
    :rtype: PLMap
    """
    start, left_piece = _OUTER_BRANCHES["left"][left]
    end, right_piece = _OUTER_BRANCHES["right"][right]
    return _unit([start, "1/3", "2/3", end],
                 [left_piece, Piece.affine(1, 0, 1), right_piece])


def flip_system(
    name: str,
    branches: Sequence[tuple[str, str]],
    perm: Sequence[int],
) -> tuple[TopGraph, TopGraph, ConjugacyCertificate]:
    """
    A conjugate pair whose upper halves are reshuffled by ``perm``.

    Copy ``k`` of the source runs ``branch_map(*branches[k])``. Over the
    upper part, copy ``perm[k]`` of the target carries the right branch of
    source copy ``k``; over the lower part the copies match.

    :param name: Prefix of the graph names.
    :type name: str
    :param branches: ``(left, right)`` shapes per copy.
    :type branches: Sequence[tuple[str, str]]
    :param perm: 0-based permutation of the copies.
    :type perm: Sequence[int]
    :return: Source, target and the certificate between them.
    :rtype: tuple[TopGraph, TopGraph, ConjugacyCertificate]
    """
    inverse = {j: k for k, j in enumerate(perm)}
    source = from_dynamical_system(
        unit_interval(), [branch_map(*b) for b in branches],
        name=f"{name}_E",
    )
    target = from_dynamical_system(
        unit_interval(),
        [branch_map(branches[j][0], branches[inverse[j]][1])
         for j in range(len(branches))],
        name=f"{name}_F",
    )
    upper = {k + 1: j + 1 for k, j in enumerate(perm)}
    cert = _copy_certificate(source, len(branches),
                             [(lower_part(), {}), (upper_part(), upper)])
    return source, target, cert


def circle_e() -> TopGraph:
    """Identity and rotation of the circle."""
    return from_dynamical_system(circle(), [PLMap.identity(circle()),
                                            rotation_map()], name="CIRCLE_E")


def circle_f() -> TopGraph:
    """Rotation and identity of the circle."""
    return from_dynamical_system(circle(), [rotation_map(),
                                            PLMap.identity(circle())],
                                 name="CIRCLE_F")


def circle_certificate() -> ConjugacyCertificate:
    """One global piece exchanging the two copies."""
    return _copy_certificate(circle_e(), 2,
                             [(Region.whole(circle()), {1: 2, 2: 1})])


GRAPH_FIXTURES: dict[str, Callable[[], TopGraph]] = {
    "D1": d1,
    "D1plus": d1_plus,
    "D1relabeled": d1_relabeled,
    "SWAP2": swap2,
    "DKFLIP_E": dkflip_e,
    "DKFLIP_F": dkflip_f,
    "CYCLE3_E": cycle3_e,
    "CYCLE3_F": cycle3_f,
    "CIRCLE_E": circle_e,
    "CIRCLE_F": circle_f,
}

CERTIFICATE_FIXTURES: dict[str, Callable[[], ConjugacyCertificate]] = {
    "DKFLIP_cert": dkflip_certificate,
    "CYCLE3_cert": cycle3_certificate,
    "CIRCLE_cert": circle_certificate,
}


def write_fixtures(outdir: str | Path) -> list[Path]:
    """
    Write every fixture as canonical JSON.

    :param outdir: Target directory, created if missing.
    :type outdir: str | Path
    :return: The written files.
    :rtype: list[Path]
    """
    root = Path(outdir)
    root.mkdir(parents=True, exist_ok=True)
    written = []
    for name, build in GRAPH_FIXTURES.items():
        path = root / f"{name}.json"
        write_json(graph_to_json(build()), path)
        written.append(path)
    for name, build_cert in CERTIFICATE_FIXTURES.items():
        path = root / f"{name}.json"
        write_json(certificate_to_json(build_cert()), path)
        written.append(path)
    _LOGGER.info("wrote %d fixture files to %s", len(written), root)
    return written
