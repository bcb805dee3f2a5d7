"""Admissible covers: construction from a certificate and the six checks."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import TYPE_CHECKING, Any

from topcorr.core.constants import (
    BAND_HIGH,
    BAND_LOW,
    CHART_THRESHOLD,
    COVER_METADATA,
    MAX_COVER_ROUNDS,
    MAX_REFINEMENT_ROUNDS,
    PAIR_LOWER_CUTOFF,
    PAIR_UPPER_CUTOFF,
)
from topcorr.core.cover.certificate import (
    ConjugacyCertificate,
    verify_certificate,
)
from topcorr.core.cover.permutations import (
    PermutationData,
    permutation_data,
    sheet_matching,
)
from topcorr.core.errors import BudgetExceededError, CertificateError, CoverError
from topcorr.core.graph import CheckResult, TopGraph
from topcorr.core.space.complex import ONE, ZERO, Point
from topcorr.core.space.partition import (
    Cover,
    Direction,
    partition_of_unity,
    separating_function,
    threshold_set,
)
from topcorr.core.space.plmap import probe_params
from topcorr.core.space.region import Region, preimage_region

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from topcorr.core.space.plmap import PLMap

_LOGGER = logging.getLogger(__name__)

Sheets = tuple[Region, ...]


def point_over(s: PLMap, sheet: Region, base_point: Point) -> Point:
    """
    The unique point of a sheet over a base point.

    :param s: The source map.
    :type s: PLMap
    :param sheet: A sheet on ``s.source``.
    :type sheet: Region
    :param base_point: Point of ``s.target``.
    :type base_point: Point
    :raises CoverError: If the sheet holds zero or several fiber points.
    :return: The fiber point in the sheet.
    :rtype: Point
    """
    found = [e for e in s.preimage(base_point) if sheet.contains(e)]
    if len(found) != 1:
        msg = (
            f"sheet {sheet} holds {len(found)} points over {base_point}, "
            "expected one"
        )
        raise CoverError(msg)
    return found[0]


def sheet_index(sheets: Sequence[Region], point: Point) -> int:
    """Index of the sheet containing an edge point."""
    for k, sheet in enumerate(sheets):
        if sheet.contains(point):
            return k
    msg = f"{point} lies in no sheet"
    raise CoverError(msg)


@dataclass(frozen=True, eq=False)
class AdmissibleCover:
    """
    Sets ``U_i`` of ``E0`` with sheets ``U_ik``, and their ``F`` side.

    ``target_sets[i]`` is ``V_i = tau(U_i)`` and ``target_sheets[i][k]``
    is ``V_ik = gamma_i(U_ik)``; the intertwiners are determined by the
    sheets and evaluated pointwise.
    """

    source: TopGraph
    target: TopGraph
    tau: PLMap
    tau_inverse: PLMap
    sets: tuple[Region, ...]
    sheets: tuple[Sheets, ...]
    target_sets: tuple[Region, ...]
    target_sheets: tuple[Sheets, ...]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.sets)

    def sheet_count(self, i: int) -> int:
        return len(self.sheets[i])

    def gamma(self, i: int, e: Point) -> Point:
        """``gamma_i(e)`` for ``e`` over ``U_i``."""
        k = sheet_index(self.sheets[i], e)
        base = self.tau(self.source.s(e))
        return point_over(self.target.s, self.target_sheets[i][k], base)

    def gamma_inverse(self, i: int, a: Point) -> Point:
        """``gamma_i^-1(a)`` for ``a`` over ``V_i``."""
        k = sheet_index(self.target_sheets[i], a)
        base = self.tau_inverse(self.target.s(a))
        return point_over(self.source.s, self.sheets[i][k], base)

    def chart_of(self, base_point: Point) -> int:
        """First ``i`` with ``base_point`` in ``V_i``."""
        for i, region in enumerate(self.target_sets):
            if region.contains(base_point):
                return i
        msg = f"{base_point} lies in no set of the cover"
        raise CoverError(msg)

    def source_permutations(self) -> PermutationData:
        return permutation_data(self.sets, self.sheets)

    def target_permutations(self) -> PermutationData:
        return permutation_data(self.target_sets, self.target_sheets)

    def with_source(
        self,
        graph: TopGraph,
        sheets: Sequence[Sheets],
    ) -> AdmissibleCover:
        """The same cover read on another graph over the same base."""
        return replace(self, source=graph, sheets=tuple(sheets))


@dataclass(frozen=True)
class AdmissibleReport:
    """Verdicts of the six admissibility conditions."""

    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.ok)

    def conditions(self) -> dict[str, bool]:
        """``C1`` to ``C6`` mapped to whether every check of it passed."""
        out = {f"C{n}": True for n in range(1, 7)}
        for check in self.checks:
            key = check.name.split("_", 1)[0]
            out[key] = out[key] and check.ok
        return out


# -- construction ------------------------------------------------------


@dataclass(frozen=True)
class _Chart:
    region: Region
    sheets: Sheets
    piece: int


def sheets_of(s: PLMap, region: Region) -> Sheets:
    """
    Split ``s^-1(region)`` into sheets mapped homeomorphically onto it.

    Lifts of every component are ordered by their point over the
    component's sample point, and the ``k``-th lifts form sheet ``k``.

    :param s: A local homeomorphism.
    :type s: PLMap
    :param region: An open region of ``s.target``.
    :type region: Region
    :raises CoverError: If a component is not evenly covered or the
        sheet count varies.
    :return: The sheets.
    :rtype: Sheets
    """
    columns = []
    for comp in region.components():
        base_point = comp.sample_point()
        assert base_point is not None
        fiber = s.preimage(base_point)
        keyed = []
        for lift in preimage_region(s, comp).components():
            inside = [e for e in fiber if lift.contains(e)]
            if len(inside) != 1:
                msg = f"component {comp} is not evenly covered"
                raise CoverError(msg)
            keyed.append((inside[0].sort_key(), lift))
        columns.append([lift for _, lift in sorted(keyed, key=lambda x: x[0])])
    counts = {len(column) for column in columns}
    if len(counts) > 1:
        msg = f"sheet count varies over {region}"
        raise CoverError(msg)
    out = []
    for k in range(counts.pop() if counts else 0):
        sheet = Region.empty(s.source)
        for column in columns:
            sheet = sheet | column[k]
        out.append(sheet)
    return tuple(out)


def _restrict(s: PLMap, chart: _Chart, region: Region) -> _Chart:
    over = preimage_region(s, region)
    return _Chart(region=region,
                  sheets=tuple(sheet & over for sheet in chart.sheets),
                  piece=chart.piece)


def _triple_point(regions: Sequence[Region]) -> Point | None:
    for a, b, c in combinations(regions, 3):
        point = (a & b & c).sample_point()
        if point is not None:
            return point
    return None


def _closure_clash(a: Region, b: Region) -> Region:
    """``(cl a - b) & (cl b - a)``, empty under the fourth condition."""
    return (a.closure() - b) & (b.closure() - a)


def _certificate_charts(
    graph: TopGraph,
    cert: ConjugacyCertificate,
) -> list[_Chart] | None:
    """The certificate pieces themselves, when they already fit."""
    regions = [piece.region for piece in cert.pieces]
    if _triple_point(regions) is not None:
        return None
    if not all(c.is_contractible() for r in regions for c in r.components()):
        return None
    try:
        return [
            _Chart(region=r, sheets=sheets_of(graph.s, r), piece=p)
            for p, r in enumerate(regions)
        ]
    except CoverError:
        return None


def _star_charts(
    graph: TopGraph,
    cert: ConjugacyCertificate,
) -> list[_Chart]:
    """Stars of graph knots, bisected until each fits in one piece."""
    extra = [
        Point.on(j, t)
        for piece in cert.pieces
        for j, ts in piece.region.all_cuts().items()
        for t in ts
    ]
    knots = graph.knots(extra)
    for rounds in range(MAX_REFINEMENT_ROUNDS + 1):
        charts, failing = [], []
        for u in knots.base.points():
            star, sheets = knots.evenly_covered_star(u)
            piece = next(
                (p for p, c in enumerate(cert.pieces)
                 if star.issubset(c.region)),
                None,
            )
            if piece is None:
                failing.append(u)
            else:
                charts.append(_Chart(region=star, sheets=sheets, piece=piece))
        if not failing:
            _LOGGER.debug("star charts settled after %d rounds: %d charts",
                          rounds, len(charts))
            return charts
        knots = knots.refined(knots.base.bisect_around(failing).points())
    msg = (
        f"stars did not fit certificate pieces in {MAX_REFINEMENT_ROUNDS} "
        "refinement rounds"
    )
    raise BudgetExceededError(msg)


def sheet_count_components(graph: TopGraph) -> dict[int, Region]:
    """Clopen parts of ``E0`` on which the sheet count is constant."""
    space = graph.base
    labels = space.component_labels
    counts: dict[int, int] = {}
    for vertex, label in labels.items():
        counts.setdefault(label, len(graph.s.preimage(Point.at(vertex))))
    out = {}
    for m in sorted(set(counts.values())):
        members = {label for label, n in counts.items() if n == m}
        out[m] = Region.from_cells(
            space, lambda p, members=members: space.component_of(p) in members,
            {},
        )
    return out


def _split_by_sheet_count(
    graph: TopGraph,
    charts: Iterable[_Chart],
) -> list[_Chart]:
    parts = sheet_count_components(graph).values()
    out = []
    for chart in charts:
        for part in parts:
            region = chart.region & part
            if not region.is_empty():
                out.append(_restrict(graph.s, chart, region))
    return out


def _separate_closures(
    graph: TopGraph,
    charts: list[_Chart],
) -> list[_Chart]:
    """Shrink to ``U_i & {f_i > 1/3}`` when some closures clash."""
    regions = [chart.region for chart in charts]
    if all(_closure_clash(a, b).is_empty()
           for a, b in combinations(regions, 2)):
        return charts
    fields = partition_of_unity(Cover.of(graph.base, regions))
    out = []
    for chart, f in zip(charts, fields, strict=True):
        region = chart.region & threshold_set(f, CHART_THRESHOLD)
        if not region.is_empty():
            out.append(_restrict(graph.s, chart, region))
    _LOGGER.debug("closure pass: %d -> %d charts", len(charts), len(out))
    return out


def _target_side(
    target: TopGraph,
    cert: ConjugacyCertificate,
    chart: _Chart,
) -> tuple[Region, Sheets]:
    """``V = tau(U)`` and ``V_k = gamma_p(U_k)`` for the chart's piece."""
    region = preimage_region(cert.tau_inverse, chart.region)
    over = preimage_region(target.s, region)
    gamma_inverse = cert.pieces[chart.piece].gamma_inverse
    return region, tuple(
        over & preimage_region(gamma_inverse, sheet)
        for sheet in chart.sheets
    )


def _matching(
    s: PLMap,
    sheets_i: Sheets,
    sheets_j: Sheets,
    base_point: Point,
) -> tuple[int, ...]:
    return tuple(
        sheet_index(sheets_j, point_over(s, sheet, base_point))
        for sheet in sheets_i
    )


def _overlap_groups(
    source: TopGraph,
    target: TopGraph,
    cert: ConjugacyCertificate,
    first: tuple[_Chart, tuple[Region, Sheets]],
    second: tuple[_Chart, tuple[Region, Sheets]],
) -> dict[tuple[tuple[int, ...], tuple[int, ...]], Region]:
    """Overlap components grouped by their sheet matching on both sides."""
    (chart_i, side_i), (chart_j, side_j) = first, second
    groups: dict[tuple[tuple[int, ...], tuple[int, ...]], Region] = {}
    for comp in (chart_i.region & chart_j.region).components():
        p = comp.sample_point()
        assert p is not None
        key = (
            _matching(source.s, chart_i.sheets, chart_j.sheets, p),
            _matching(target.s, side_i[1], side_j[1], cert.tau(p)),
        )
        groups[key] = groups[key] | comp if key in groups else comp
    return groups


def _split_pair(
    graph: TopGraph,
    charts: list[_Chart],
    i: int,
    j: int,
    groups: Iterable[Region],
) -> list[_Chart]:
    """Cut a pair apart with a separating function and add band pieces."""
    space = graph.base
    u_i, u_j = charts[i].region, charts[j].region
    f = separating_function(space, u_i.closure() - u_j, u_j.closure() - u_i)
    band = threshold_set(f, BAND_LOW, Direction.BAND, BAND_HIGH)
    out = list(charts)
    out[i] = _restrict(graph.s, charts[i],
                       u_i & threshold_set(f, PAIR_UPPER_CUTOFF))
    out[j] = _restrict(graph.s, charts[j],
                       u_j & threshold_set(f, PAIR_LOWER_CUTOFF,
                                           Direction.BELOW))
    out.extend(_restrict(graph.s, charts[i], group & band)
               for group in groups)
    _LOGGER.debug("split pair (%d, %d) into %d band pieces", i, j,
                  len(out) - len(charts))
    return [chart for chart in out if not chart.region.is_empty()]


def build_admissible_cover(
    source: TopGraph,
    target: TopGraph,
    cert: ConjugacyCertificate,
) -> AdmissibleCover:
    """
    Build an admissible cover from a local conjugacy certificate.

    Charts start as the certificate pieces when those are trees without
    triple overlaps, otherwise as stars of the graph knots small enough
    to sit in one piece.  Sets are split by constant sheet count, shrunk
    to ``f_i > 1/3`` when closures clash, and every pair whose overlap
    components match sheets differently is cut at ``f > 3/5`` and
    ``f < 2/5`` with one band piece ``3/10 < f < 7/10`` per matching.

    :param source: The graph ``E``.
    :type source: TopGraph
    :param target: The graph ``F``.
    :type target: TopGraph
    :param cert: A certificate of ``E`` against ``F``.
    :type cert: ConjugacyCertificate
    :raises CertificateError: If the certificate does not verify.
    :raises BudgetExceededError: If refinement does not settle.
    :raises CoverError: If the result fails an admissibility check.
    :return: The cover.
    :rtype: AdmissibleCover
    """
    verdict = verify_certificate(source, target, cert)
    if not verdict.ok:
        first = verdict.failures()[0]
        msg = f"certificate fails {first.name} at {first.witness}"
        raise CertificateError(msg)
    charts = _certificate_charts(source, cert)
    origin = "certificate pieces"
    if charts is None:
        charts = _star_charts(source, cert)
        origin = "knot stars"
    charts = _split_by_sheet_count(source, charts)
    for rounds in range(MAX_COVER_ROUNDS):
        charts = _separate_closures(source, charts)
        sides = [_target_side(target, cert, c) for c in charts]
        failing = None
        for i, j in combinations(range(len(charts)), 2):
            groups = _overlap_groups(source, target, cert,
                                     (charts[i], sides[i]),
                                     (charts[j], sides[j]))
            if len(groups) > 1:
                failing = (i, j, groups)
                break
        if failing is None:
            _LOGGER.debug("pair refinement settled after %d rounds", rounds)
            break
        i, j, groups = failing
        charts = _split_pair(source, charts, i, j, groups.values())
    else:
        msg = f"pair refinement did not settle in {MAX_COVER_ROUNDS} rounds"
        raise BudgetExceededError(msg)
    cover = AdmissibleCover(
        source=source,
        target=target,
        tau=cert.tau,
        tau_inverse=cert.tau_inverse,
        sets=tuple(c.region for c in charts),
        sheets=tuple(c.sheets for c in charts),
        target_sets=tuple(side[0] for side in sides),
        target_sheets=tuple(side[1] for side in sides),
        metadata={
            **COVER_METADATA,
            "charts": origin,
            "pieces": [c.piece for c in charts],
            "sheet_counts": {
                str(m): str(part)
                for m, part in sheet_count_components(source).items()
            },
        },
    )
    report = check_admissible(source, target, cover)
    if not report.ok:
        first = report.failures()[0]
        msg = f"constructed cover fails {first.name}: {first.detail}"
        raise CoverError(msg)
    _LOGGER.info("admissible cover with %d sets from %s", len(cover), origin)
    return cover


# -- checks ------------------------------------------------------------


def _add_cut(cuts: dict[int, set], point: Point) -> None:
    if point.segment is not None and point.t is not None:
        cuts[point.segment].add(point.t)


def _region_points(regions: Iterable[Region]) -> list[Point]:
    return [
        Point.on(j, t)
        for region in regions
        for j, ts in region.all_cuts().items()
        for t in ts
    ]


def probe_points(cover: AdmissibleCover) -> tuple[Point, ...]:
    """
    Base points deciding the pointwise conditions exactly.

    Cuts are the images in ``E0`` of every breakpoint of ``s``, ``r``
    and ``tau`` on both sides, of all set and sheet endpoints; on each
    gap every section of a sheet and every ``r`` along it is affine.

    :param cover: The cover.
    :type cover: AdmissibleCover
    :return: Vertices, cut points and two points per gap.
    :rtype: tuple[Point, ...]
    """
    e, f = cover.source, cover.target
    cuts: dict[int, set] = defaultdict(set)
    for p in [*e.s.critical_points(), *e.r.critical_points(),
              *_region_points(s for row in cover.sheets for s in row)]:
        _add_cut(cuts, e.s(p))
    for p in [*f.s.critical_points(), *f.r.critical_points(),
              *_region_points(s for row in cover.target_sheets for s in row)]:
        _add_cut(cuts, cover.tau_inverse(f.s(p)))
    for p in _region_points(cover.target_sets):
        _add_cut(cuts, cover.tau_inverse(p))
    for p in [*_region_points(cover.sets), *cover.tau.critical_points()]:
        _add_cut(cuts, p)
    for p in cover.tau_inverse.critical_points():
        _add_cut(cuts, cover.tau_inverse(p))
    base = e.base
    points = [Point.at(v) for v in base.vertices]
    for j in range(len(base.segments)):
        knots = sorted({ZERO, ONE, *cuts[j]})
        points.extend(Point.on(j, t) for t in probe_params(knots))
    return tuple(points)


def _check_sheets(
    name: str,
    s: PLMap,
    region: Region,
    sheets: Sheets,
    probes: Iterable[Point],
) -> CheckResult:
    """Sheets partition ``s^-1(region)`` with one point over each probe."""
    if not region.is_open():
        return CheckResult(name=name, ok=False, detail="set is not open")
    union = Region.empty(s.source)
    for k, sheet in enumerate(sheets):
        overlap = (union & sheet).sample_point()
        if overlap is not None:
            return CheckResult(name=name, ok=False, witness=str(overlap),
                               detail=f"sheet {k} meets an earlier sheet")
        union = union | sheet
    over = preimage_region(s, region)
    if union != over:
        witness = ((union - over) | (over - union)).sample_point()
        return CheckResult(name=name, ok=False, witness=str(witness),
                           detail="sheets do not fill the preimage")
    for p in probes:
        if not region.contains(p):
            continue
        for k, sheet in enumerate(sheets):
            count = sum(sheet.contains(e) for e in s.preimage(p))
            if count != 1:
                return CheckResult(
                    name=name, ok=False, witness=str(p),
                    detail=f"sheet {k} has {count} points over it",
                )
    return CheckResult(name=name, ok=True)


def _check_matching(
    name: str,
    sets: Sequence[Region],
    sheets: Sequence[Sheets],
    i: int,
    j: int,
) -> CheckResult:
    matched = sheet_matching(sheets[i], sheets[j])
    for k, ls in enumerate(matched):
        if len(ls) != 1:
            witness = None
            if ls:
                witness = str((sheets[i][k] & sheets[j][ls[0]]).sample_point())
            return CheckResult(
                name=name, ok=False, witness=witness,
                detail=f"({i}, {j}, {k}) meets sheets {ls}",
            )
    images = [ls[0] for ls in matched]
    if sorted(images) != list(range(len(sheets[j]))):
        return CheckResult(
            name=name, ok=False,
            witness=str((sets[i] & sets[j]).sample_point()),
            detail=f"({i}, {j}) matches sheets {images}",
        )
    return CheckResult(name=name, ok=True)


def check_admissible(
    source: TopGraph,
    target: TopGraph,
    cover: AdmissibleCover,
) -> AdmissibleReport:
    """
    Check the six admissibility conditions.

    Set equalities and intersections are exact; fiber counts and the
    ``r`` intertwining are checked at :func:`probe_points`, where all
    data is affine between probes.

    :param source: The graph ``E``.
    :type source: TopGraph
    :param target: The graph ``F``.
    :type target: TopGraph
    :param cover: The cover.
    :type cover: AdmissibleCover
    :return: Per-condition verdicts with witnesses.
    :rtype: AdmissibleReport
    """
    checks: list[CheckResult] = []
    probes = probe_points(cover)
    n = len(cover.sets)
    for name, space, sets in (("source", source.base, cover.sets),
                              ("target", target.base, cover.target_sets)):
        missing = Cover.of(space, sets).uncovered_point()
        checks.append(CheckResult(
            name=f"C1_{name}_covering", ok=missing is None,
            witness=None if missing is None else str(missing),
        ))
    for i in range(n):
        checks.append(_check_sheets(f"C1_source_{i}", source.s,
                                    cover.sets[i], cover.sheets[i], probes))
        checks.append(_check_sheets(
            f"C1_target_{i}", target.s, cover.target_sets[i],
            cover.target_sheets[i], [cover.tau(p) for p in probes],
        ))
        image = preimage_region(cover.tau_inverse, cover.sets[i])
        if image != cover.target_sets[i]:
            checks.append(CheckResult(name=f"C2_{i}_tau", ok=False,
                                      detail="V_i is not tau(U_i)"))
    if not all(c.ok for c in checks):
        return AdmissibleReport(checks=tuple(checks))
    for i in range(n):
        checks.append(_check_intertwining(cover, i, probes))
    for i, j, k in combinations(range(n), 3):
        point = (cover.sets[i] & cover.sets[j] & cover.sets[k]).sample_point()
        checks.append(CheckResult(
            name=f"C3_{i}_{j}_{k}", ok=point is None,
            witness=None if point is None else str(point),
        ))
    for i, j in combinations(range(n), 2):
        point = _closure_clash(cover.sets[i], cover.sets[j]).sample_point()
        checks.append(CheckResult(
            name=f"C4_{i}_{j}", ok=point is None,
            witness=None if point is None else str(point),
        ))
        if (cover.sets[i] & cover.sets[j]).is_empty():
            continue
        checks.append(_check_matching(f"C5_{i}_{j}", cover.sets,
                                      cover.sheets, i, j))
        checks.append(_check_matching(f"C6_{i}_{j}", cover.target_sets,
                                      cover.target_sheets, i, j))
    report = AdmissibleReport(checks=tuple(checks))
    _LOGGER.info("admissibility of %d sets: %s", n, report.conditions())
    return report


def _check_intertwining(
    cover: AdmissibleCover,
    i: int,
    probes: Iterable[Point],
) -> CheckResult:
    """``r_F(V_ik over tau p) = tau(r_E(U_ik over p))`` at every probe."""
    e, f = cover.source, cover.target
    for p in probes:
        if not cover.sets[i].contains(p):
            continue
        for k in range(cover.sheet_count(i)):
            edge = point_over(e.s, cover.sheets[i][k], p)
            image = point_over(f.s, cover.target_sheets[i][k], cover.tau(p))
            if f.r(image) != cover.tau(e.r(edge)):
                return CheckResult(
                    name=f"C2_{i}", ok=False, witness=str(edge),
                    detail=f"r_F({image}) != tau(r_E({edge}))",
                )
    return CheckResult(name=f"C2_{i}", ok=True)
