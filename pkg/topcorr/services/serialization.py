"""Module for reading and writing graphs, certificates and covers as JSON."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from topcorr.core.cover.admissible import AdmissibleCover, Sheets
from topcorr.core.cover.certificate import (
    CertificatePiece,
    ConjugacyCertificate,
)
from topcorr.core.cover.permutations import PermutationData
from topcorr.core.errors import PreconditionError, SchemaError
from topcorr.core.graph import TopGraph
from topcorr.core.space.complex import Complex1, Point, as_fraction
from topcorr.core.space.plmap import Piece, PLMap, SegmentImage
from topcorr.core.space.region import Interval, Region
from topcorr.services.validation import require_schema

Document = dict[str, Any]


# -- scalars and points -----------------------------------------------


def rational_text(value: Fraction) -> str:
    """``Fraction(1, 3)`` as ``"1/3"``; integers without a denominator."""
    return str(value)


def parse_rational(value: str | float, path: str) -> Fraction:
    """
    Read a rational written as a string or a JSON number.

    :param value: ``"1/3"``, ``"0.25"`` or a number.
    :type value: str | float
    :param path: Pointer of the value, for errors.
    :type path: str
    :raises SchemaError: If the value is not a rational.
    :return: The exact rational.
    :rtype: Fraction
    """
    try:
        return as_fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        msg = f"{value!r} is not a rational number"
        raise SchemaError(msg, path=path) from exc


def point_to_json(point: Point) -> Document:
    if point.vertex is not None:
        return {"vertex": point.vertex}
    assert point.t is not None
    return {"segment": point.segment, "t": rational_text(point.t)}


def point_from_json(doc: Document, space: Complex1, path: str) -> Point:
    """
    Read a point and check that it lies on ``space``.

    :param doc: ``{"vertex": id}`` or ``{"segment": j, "t": r}``.
    :type doc: Document
    :param space: The complex the point must lie on.
    :type space: Complex1
    :param path: Pointer of the point.
    :type path: str
    :raises SchemaError: If the point is malformed or off the complex.
    :return: The point.
    :rtype: Point
    """
    try:
        if "vertex" in doc:
            point = Point.at(doc["vertex"])
        else:
            point = space.point(doc["segment"],
                                parse_rational(doc["t"], f"{path}/t"))
        space.require(point)
    except PreconditionError as exc:
        raise SchemaError(str(exc), path=path) from exc
    return point


def parse_point(text: str, space: Complex1) -> Point:
    """
    Read the command-line point syntax: a vertex id, or ``segment:t``.

    Vertex ids win, so ``1:0`` names a vertex whenever one has that id.

    :param text: The text.
    :type text: str
    :param space: The complex.
    :type space: Complex1
    :raises SchemaError: If the text names no point of ``space``.
    :return: The point.
    :rtype: Point
    """
    text = text.strip()
    if space.has_vertex(text):
        return Point.at(text)
    segment, sep, t = text.rpartition(":")
    if not sep or not segment.strip().isdigit():
        msg = f"{text!r} is neither a vertex id nor 'segment:t'"
        raise SchemaError(msg, path="/argv")
    try:
        return space.point(int(segment), parse_rational(t, "/argv"))
    except PreconditionError as exc:
        raise SchemaError(str(exc), path="/argv") from exc


# -- complexes and maps -----------------------------------------------


def complex_to_json(space: Complex1) -> Document:
    doc: Document = {"vertices": list(space.vertices)}
    if space.segments:
        doc["segments"] = [[seg.start, seg.end] for seg in space.segments]
    return doc


def complex_from_json(doc: Document, path: str) -> Complex1:
    """
    Read a complex, checking segment endpoints against the vertex list.

    :param doc: The complex document.
    :type doc: Document
    :param path: Pointer of the document.
    :type path: str
    :raises SchemaError: At ``<path>/segments/<i>`` for unknown endpoints.
    :return: The complex.
    :rtype: Complex1
    """
    vertices = doc["vertices"]
    known = set(vertices)
    segments = doc.get("segments", [])
    for index, (start, end) in enumerate(segments):
        unknown = [v for v in (start, end) if v not in known]
        if unknown:
            msg = f"segment references unknown vertices {unknown}"
            raise SchemaError(msg, path=f"{path}/segments/{index}")
    return Complex1.build(vertices, [tuple(seg) for seg in segments])


def _piece_to_json(piece: Piece) -> Document:
    if piece.vertex is not None:
        return {"vertex": piece.vertex}
    return {
        "segment": piece.segment,
        "start": rational_text(piece.start),
        "stop": rational_text(piece.stop),
    }


def _piece_from_json(doc: Document, path: str) -> Piece:
    if "vertex" in doc:
        return Piece.constant(doc["vertex"])
    return Piece.affine(
        doc["segment"],
        parse_rational(doc["start"], f"{path}/start"),
        parse_rational(doc["stop"], f"{path}/stop"),
    )


def plmap_to_json(m: PLMap) -> Document:
    doc: Document = {
        "vertex_images": {
            v: point_to_json(m.vertex_images[v]) for v in m.source.vertices
        },
    }
    if m.segment_images:
        doc["segment_images"] = [
            {
                "breaks": [rational_text(b) for b in image.breaks],
                "targets": [_piece_to_json(p) for p in image.pieces],
            }
            for image in m.segment_images
        ]
    return doc


def plmap_from_json(
    doc: Document,
    source: Complex1,
    target: Complex1,
    path: str,
) -> PLMap:
    """
    Read a PL map between two known complexes.

    :param doc: The map document.
    :type doc: Document
    :param source: Source complex.
    :type source: Complex1
    :param target: Target complex.
    :type target: Complex1
    :param path: Pointer of the document.
    :type path: str
    :raises SchemaError: For unknown vertices, off-target images or a
        discontinuous assignment.
    :return: The map.
    :rtype: PLMap
    """
    images = doc["vertex_images"]
    for v in images:
        if not source.has_vertex(v):
            msg = f"image given for unknown vertex {v!r}"
            raise SchemaError(msg, path=f"{path}/vertex_images/{v}")
    vertex_images = {
        v: point_from_json(images[v], target, f"{path}/vertex_images/{v}")
        for v in images
    }
    segment_images = []
    for index, image in enumerate(doc.get("segment_images", [])):
        where = f"{path}/segment_images/{index}"
        segment_images.append(
            SegmentImage.build(
                [parse_rational(b, f"{where}/breaks/{k}")
                 for k, b in enumerate(image.get("breaks", []))],
                [_piece_from_json(p, f"{where}/targets/{k}")
                 for k, p in enumerate(image["targets"])],
            ),
        )
    try:
        return PLMap(source=source, target=target,
                     vertex_images=vertex_images,
                     segment_images=tuple(segment_images))
    except PreconditionError as exc:
        raise SchemaError(str(exc), path=path) from exc


def region_to_json(region: Region) -> Document:
    return {
        "vertices": sorted(region.vertices),
        "intervals": [
            {
                "segment": j,
                "lo": rational_text(iv.lo),
                "hi": rational_text(iv.hi),
                "lo_closed": iv.lo_closed,
                "hi_closed": iv.hi_closed,
            }
            for j, ivs in enumerate(region.intervals)
            for iv in ivs
        ],
    }


def region_from_json(doc: Document, space: Complex1, path: str) -> Region:
    """
    Read a region of ``space``.

    :param doc: ``{"vertices": [...], "intervals": [...]}``.
    :type doc: Document
    :param space: The complex.
    :type space: Complex1
    :param path: Pointer of the document.
    :type path: str
    :raises SchemaError: For unknown vertices or segments.
    :return: The normalized region.
    :rtype: Region
    """
    intervals: dict[int, list[Interval]] = {}
    for k, iv in enumerate(doc.get("intervals", [])):
        where = f"{path}/intervals/{k}"
        lo = parse_rational(iv["lo"], f"{where}/lo")
        hi = parse_rational(iv["hi"], f"{where}/hi")
        if not Fraction(0) <= lo <= hi <= Fraction(1):
            msg = f"interval [{lo}, {hi}] is not inside [0, 1]"
            raise SchemaError(msg, path=where)
        intervals.setdefault(iv["segment"], []).append(
            Interval(lo, hi, iv.get("lo_closed", False),
                     iv.get("hi_closed", False)),
        )
    try:
        return Region.from_parts(space, doc.get("vertices", []), intervals)
    except PreconditionError as exc:
        raise SchemaError(str(exc), path=path) from exc


# -- documents --------------------------------------------------------


def graph_to_json(graph: TopGraph) -> Document:
    doc: Document = {
        "base": complex_to_json(graph.base),
        "edges": complex_to_json(graph.edges),
        "r": plmap_to_json(graph.range_map),
        "s": plmap_to_json(graph.source_map),
    }
    if graph.name:
        doc["name"] = graph.name
    return doc


def graph_from_json(doc: Any) -> TopGraph:
    """
    Read a graph document; the graph is not validated here.

    :param doc: The parsed document.
    :type doc: Any
    :raises SchemaError: On schema or reference violations.
    :return: The graph.
    :rtype: TopGraph
    """
    require_schema(doc, "graph")
    base = complex_from_json(doc["base"], "/base")
    edges = complex_from_json(doc["edges"], "/edges")
    return TopGraph(
        base=base,
        edges=edges,
        range_map=plmap_from_json(doc["r"], edges, base, "/r"),
        source_map=plmap_from_json(doc["s"], edges, base, "/s"),
        name=doc.get("name", ""),
    )


def certificate_to_json(cert: ConjugacyCertificate) -> Document:
    return {
        "tau": plmap_to_json(cert.tau),
        "tau_inverse": plmap_to_json(cert.tau_inverse),
        "pieces": [
            {
                "U": region_to_json(piece.region),
                "gamma": plmap_to_json(piece.gamma),
                "gamma_inverse": plmap_to_json(piece.gamma_inverse),
            }
            for piece in cert.pieces
        ],
    }


def _inverse_of(
    m: PLMap,
    doc: Document | None,
    path: str,
) -> PLMap:
    if doc is not None:
        return plmap_from_json(doc, m.target, m.source, path)
    try:
        return m.inverse()
    except PreconditionError as exc:
        raise SchemaError(str(exc), path=path) from exc


def certificate_from_json(
    doc: Any,
    source: TopGraph,
    target: TopGraph,
) -> ConjugacyCertificate:
    """
    Read a certificate of ``source`` against ``target``.

    Missing inverses are computed; the certificate is not verified here.

    :param doc: The parsed document.
    :type doc: Any
    :param source: The graph ``E``.
    :type source: TopGraph
    :param target: The graph ``F``.
    :type target: TopGraph
    :raises SchemaError: On schema or reference violations.
    :return: The certificate.
    :rtype: ConjugacyCertificate
    """
    require_schema(doc, "certificate")
    tau = plmap_from_json(doc["tau"], source.base, target.base, "/tau")
    pieces = []
    for k, piece in enumerate(doc["pieces"]):
        where = f"/pieces/{k}"
        gamma = plmap_from_json(piece["gamma"], source.edges, target.edges,
                                f"{where}/gamma")
        pieces.append(
            CertificatePiece(
                region=region_from_json(piece["U"], source.base,
                                        f"{where}/U"),
                gamma=gamma,
                gamma_inverse=_inverse_of(gamma, piece.get("gamma_inverse"),
                                          f"{where}/gamma_inverse"),
            ),
        )
    return ConjugacyCertificate(
        tau=tau,
        tau_inverse=_inverse_of(tau, doc.get("tau_inverse"), "/tau_inverse"),
        pieces=tuple(pieces),
    )


def _permutations_to_json(data: PermutationData) -> Document:
    return {f"{i},{j}": list(p) for (i, j), p in sorted(data.items())}


def cover_to_json(cover: AdmissibleCover) -> Document:
    return {
        "tau": plmap_to_json(cover.tau),
        "sets": [region_to_json(u) for u in cover.sets],
        "sheets": [[region_to_json(u) for u in row] for row in cover.sheets],
        "target_sets": [region_to_json(v) for v in cover.target_sets],
        "target_sheets": [
            [region_to_json(v) for v in row] for row in cover.target_sheets
        ],
        "permutations": {
            "source": _permutations_to_json(cover.source_permutations()),
            "target": _permutations_to_json(cover.target_permutations()),
        },
        "metadata": cover.metadata,
    }


def cover_from_json(
    doc: Any,
    source: TopGraph,
    target: TopGraph,
) -> AdmissibleCover:
    """
    Read a cover of ``source`` against ``target``.

    Permutation data is recomputed from the sheets.

    :param doc: The parsed document.
    :type doc: Any
    :param source: The graph ``E``.
    :type source: TopGraph
    :param target: The graph ``F``.
    :type target: TopGraph
    :raises SchemaError: On schema or reference violations.
    :return: The cover, unchecked.
    :rtype: AdmissibleCover
    """
    require_schema(doc, "cover")
    tau = plmap_from_json(doc["tau"], source.base, target.base, "/tau")
    return AdmissibleCover(
        source=source,
        target=target,
        tau=tau,
        tau_inverse=_inverse_of(tau, None, "/tau"),
        sets=_regions(doc, "sets", source.base),
        sheets=_sheet_table(doc, "sheets", source.edges),
        target_sets=_regions(doc, "target_sets", target.base),
        target_sheets=_sheet_table(doc, "target_sheets", target.edges),
        metadata=dict(doc.get("metadata", {})),
    )


def _regions(doc: Document, key: str, space: Complex1) -> tuple[Region, ...]:
    return tuple(region_from_json(item, space, f"/{key}/{k}")
                 for k, item in enumerate(doc[key]))


def _sheet_table(doc: Document, key: str, space: Complex1) -> tuple[
    Sheets, ...
]:
    return tuple(
        tuple(region_from_json(item, space, f"/{key}/{i}/{k}")
              for k, item in enumerate(row))
        for i, row in enumerate(doc[key])
    )


# -- files ------------------------------------------------------------


def dumps(doc: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent."""
    return json.dumps(doc, indent=2, sort_keys=True)


def load_json(path: str | Path) -> Any:
    """
    Parse a JSON file.

    :param path: The file.
    :type path: str | Path
    :raises SchemaError: If the file is not JSON or cannot be read.
    :return: The parsed document.
    :rtype: Any
    """
    try:
        with Path(path).open(encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        msg = f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})"
        raise SchemaError(msg) from exc
    except OSError as exc:
        msg = f"cannot read {path}: {exc.strerror}"
        raise SchemaError(msg) from exc


def write_json(doc: Any, path: str | Path) -> None:
    Path(path).write_text(dumps(doc) + "\n", encoding="utf-8")


def load_graph(path: str | Path) -> TopGraph:
    return graph_from_json(load_json(path))


def load_certificate(
    path: str | Path,
    source: TopGraph,
    target: TopGraph,
) -> ConjugacyCertificate:
    return certificate_from_json(load_json(path), source, target)


def load_cover(
    path: str | Path,
    source: TopGraph,
    target: TopGraph,
) -> AdmissibleCover:
    return cover_from_json(load_json(path), source, target)
