"""Command-line entry point: ``topcorr <command> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from collections import Counter
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import numpy as np

from topcorr.core.characters import (
    CharacterPoint,
    character_coordinates,
    eval_character,
    fiber_dimension,
    make_bumps,
)
from topcorr.core.corr import CoefFn, CorrVector
from topcorr.core.cover.admissible import (
    build_admissible_cover,
    check_admissible,
)
from topcorr.core.cover.certificate import verify_certificate
from topcorr.core.cover.discrete import (
    NotConjugate,
    decide_local_conjugacy_discrete,
)
from topcorr.core.equiv.chain import full_equivalence
from topcorr.core.equiv.unitary import FlipUnitary
from topcorr.core.equiv.verify import verify_unitary
from topcorr.core.errors import NotDiscreteError, SchemaError, TopcorrError
from topcorr.core.fock import (
    AlgebraElement,
    element_matrix,
    fock_basis,
    parse_element,
)
from topcorr.core.graph import CheckResult, edges_between
from topcorr.core.nest import build_nest_rep, diagonality_check, eval_nest_rep
from topcorr.core.settings import get_settings
from topcorr.core.space.field import ScalarField
from topcorr.services.fixtures import write_fixtures
from topcorr.services.reports.registry import REPORT_REGISTRY
from topcorr.services.reports.renderer import (
    render_markdown_to_html,
    render_report_md,
    save_residuals_csv,
)
from topcorr.services.serialization import (
    certificate_to_json,
    cover_to_json,
    dumps,
    load_certificate,
    load_graph,
    parse_point,
    write_json,
)

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from topcorr.core.graph import TopGraph

_LOGGER = logging.getLogger(__name__)

Report = dict[str, Any]


class CommandFailedError(TopcorrError):
    """A command produced its report but the verdict is a failure."""

    def __init__(self, report: Report, exit_code: int) -> None:
        self.report = report
        self.code = exit_code
        super().__init__(report.get("summary", "command failed"))


def _cplx(value: complex | float) -> list[float]:
    z = complex(value)
    return [z.real, z.imag]


def _checks(checks: Sequence[CheckResult]) -> list[dict[str, Any]]:
    return [
        {"name": c.name, "ok": c.ok, "witness": c.witness,
         "detail": c.detail}
        for c in checks
    ]


def _parse_complex_list(text: str | None) -> list[complex] | None:
    if text is None:
        return None
    try:
        return [complex(part.strip().replace(" ", ""))
                for part in text.split(",") if part.strip()]
    except ValueError as exc:
        msg = f"cannot read complex coordinates from {text!r}"
        raise SchemaError(msg, path="/argv") from exc


# -- commands ---------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> Report:
    graph = load_graph(args.graph)
    report = graph.validate()
    out = {
        "graph": graph.name or args.graph,
        "ok": report.ok,
        "discrete": graph.is_discrete,
        "base": {"vertices": len(graph.base.vertices),
                 "segments": len(graph.base.segments)},
        "edges": {"vertices": len(graph.edges.vertices),
                  "segments": len(graph.edges.segments)},
        "checks": _checks(report.checks),
        "summary": "valid" if report.ok else "invalid",
    }
    if not report.ok:
        raise CommandFailedError(out, 3)
    return out


def cmd_characters(args: argparse.Namespace) -> Report:
    graph = load_graph(args.graph).require_valid()
    v = parse_point(args.vertex, graph.base)
    n, fiber = fiber_dimension(graph, v)
    theta = CharacterPoint.at(graph, v, _parse_complex_list(args.z))
    bumps = make_bumps(graph, v)
    coordinates = character_coordinates(graph, v, bumps, theta)
    evaluations = [
        {"element": "1", "value": _cplx(eval_character(
            theta, AlgebraElement.pi(CoefFn.constant(graph))))},
    ]
    for k, bump in enumerate(bumps.bumps, start=1):
        t_k = AlgebraElement.t(bump)
        evaluations.append({"element": f"t(b{k})",
                            "value": _cplx(eval_character(theta, t_k))})
        evaluations.append({"element": f"t(b{k})*t(b{k})",
                            "value": _cplx(eval_character(theta,
                                                          t_k * t_k))})
    return {
        "graph": graph.name,
        "vertex": str(v),
        "n": n,
        "loops": [str(e) for e in fiber.edges],
        "z": [_cplx(c) for c in theta.z],
        "coordinates": [_cplx(c) for c in coordinates],
        "evaluations": evaluations,
        "summary": f"character ball of dimension {n} over {v}",
    }


def _vanishing_on(graph: TopGraph, points: Sequence[Any]) -> CorrVector:
    """The constant 1, pinned to 0 at the given edge points."""
    vertex_values = {v: Fraction(1) for v in graph.edges.vertices}
    interior: dict[int, dict[Fraction, Fraction]] = {}
    for e in points:
        if e.vertex is not None:
            vertex_values[e.vertex] = Fraction(0)
        else:
            interior.setdefault(e.segment, {})[e.t] = Fraction(0)
    return CorrVector(graph, ScalarField.piecewise_linear(
        graph.edges, vertex_values, interior))


def cmd_nestrep(args: argparse.Namespace) -> Report:
    graph = load_graph(args.graph).require_valid()
    v_text, _, w_text = args.pair.partition(",")
    v = parse_point(v_text, graph.base)
    w = parse_point(w_text, graph.base)
    fiber = edges_between(graph, v, w)
    rho = build_nest_rep(graph, v, w)
    one = CorrVector.constant(graph)
    masked = _vanishing_on(graph, fiber.edges)
    sample = eval_nest_rep(rho, AlgebraElement.t(one))
    diagonality = []
    for label, x in (("constant 1", one), ("vanishing on the fiber", masked)):
        check = diagonality_check(rho, x)
        diagonality.append({
            "vector": label,
            "diagonal": check.diagonal,
            "corner": _cplx(check.corner),
            "support_off_fiber": check.support_off_fiber,
        })
    return {
        "graph": graph.name,
        "v": str(v),
        "w": str(w),
        "n": fiber.n,
        "fiber": [str(e) for e in fiber.edges],
        "weights": {str(e): _cplx(lam) for e, lam in rho.weights.items()},
        "sample": {
            "element": "t(1)",
            "matrix": [[_cplx(c) for c in row] for row in sample],
        },
        "diagonality": diagonality,
        "summary": f"{fiber.n} edges from {w} to {v}",
    }


def cmd_fock(args: argparse.Namespace) -> Report:
    graph = load_graph(args.graph).require_valid()
    try:
        element = parse_element(graph, args.element)
    except ValueError as exc:
        raise SchemaError(str(exc), path="/argv") from exc
    basis = fock_basis(graph, args.depth)
    matrix = element_matrix(element, basis)
    norm = float(np.linalg.norm(matrix, 2)) if basis.dimension else 0.0
    per_degree = Counter(degree for degree, _ in basis.paths)
    return {
        "graph": graph.name,
        "element": args.element,
        "depth": args.depth,
        "dimension": basis.dimension,
        "paths_per_degree": {str(d): per_degree[d]
                             for d in sorted(per_degree)},
        "norm_lower_bound": norm,
        "summary": f"{basis.dimension}x{basis.dimension} matrix, "
                   f"norm >= {norm:.6g}",
    }


def cmd_conjugacy(args: argparse.Namespace) -> Report:
    source = load_graph(args.source).require_valid()
    target = load_graph(args.target).require_valid()
    out: Report = {"source": source.name, "target": target.name}
    if args.certificate:
        cert = load_certificate(args.certificate, source, target)
        report = verify_certificate(source, target, cert)
        out.update(
            verdict="conjugate" if report.ok else "certificate_failed",
            checks=_checks(report.checks),
            summary=("certificate verified" if report.ok
                     else "certificate does not verify"),
        )
        if not report.ok:
            raise CommandFailedError(out, 3)
        return out
    if not (source.is_discrete and target.is_discrete):
        msg = (
            "deciding local conjugacy needs discrete graphs; pass "
            "--certificate for PL graphs"
        )
        raise NotDiscreteError(msg)
    result = decide_local_conjugacy_discrete(source, target)
    if isinstance(result, NotConjugate):
        out.update(verdict="not_conjugate", reason=result.reason,
                   summary=f"not locally conjugate: {result.reason}")
        return out
    document = certificate_to_json(result)
    if args.out:
        write_json(document, args.out)
    out.update(verdict="conjugate", certificate=document,
               summary="locally conjugate")
    return out


def cmd_cover(args: argparse.Namespace) -> Report:
    source = load_graph(args.source).require_valid()
    target = load_graph(args.target).require_valid()
    cert = load_certificate(args.certificate, source, target)
    cover = build_admissible_cover(source, target, cert)
    report = check_admissible(source, target, cover)
    document = cover_to_json(cover)
    if args.out:
        write_json(document, args.out)
    return {
        "source": source.name,
        "target": target.name,
        "sets": len(cover),
        "sheet_counts": [cover.sheet_count(i) for i in range(len(cover))],
        "conditions": report.conditions(),
        "checks": _checks(report.checks),
        "permutations": document["permutations"],
        "metadata": cover.metadata,
        "summary": f"admissible cover with {len(cover)} sets",
    }


def cmd_equivalence(args: argparse.Namespace) -> Report:
    source = load_graph(args.source).require_valid()
    target = load_graph(args.target).require_valid()
    cert = load_certificate(args.certificate, source, target)
    seed = args.seed if args.seed is not None else get_settings().seed
    chain = full_equivalence(source, target, cert)
    verification = verify_unitary(chain.unitary, samples=args.samples,
                                  seed=seed)
    if args.csv:
        save_residuals_csv(verification.rows, args.csv)
    steps = []
    for step in chain.steps:
        entry: dict[str, Any] = {
            "kind": "flip" if isinstance(step, FlipUnitary) else "pullback",
            "source": step.source.name,
            "target": step.target.name,
        }
        if isinstance(step, FlipUnitary):
            entry["pair"] = [step.spec.i0, step.spec.j0]
            entry["sheets"] = [step.spec.k0, step.spec.l0]
        steps.append(entry)
    ok = verification.ok()
    out = {
        "source": source.name,
        "target": target.name,
        "sets": len(chain.cover),
        "sigma": {f"{i},{j}": list(p)
                  for (i, j), p in sorted(chain.sigma.items())},
        "flips": chain.flips,
        "steps": steps,
        "verification": {
            "isometry": verification.isometry,
            "left_module": verification.left_module,
            "right_module": verification.right_module,
            "continuity": verification.continuity,
            "samples": verification.samples,
            "seed": verification.seed,
            "ok": ok,
            "note": verification.note,
        },
        "summary": (f"{chain.flips} flips, residuals "
                    f"{'within' if ok else 'above'} tolerance"),
    }
    if not ok:
        raise CommandFailedError(out, 3)
    return out


def cmd_fixtures(args: argparse.Namespace) -> Report:
    files = write_fixtures(args.outdir)
    return {
        "outdir": str(args.outdir),
        "files": [path.name for path in files],
        "summary": f"{len(files)} fixture files",
    }


# -- parser -----------------------------------------------------------


COMMANDS: dict[str, Callable[[argparse.Namespace], Report]] = {
    "validate": cmd_validate,
    "characters": cmd_characters,
    "nestrep": cmd_nestrep,
    "fock": cmd_fock,
    "conjugacy": cmd_conjugacy,
    "cover": cmd_cover,
    "equivalence": cmd_equivalence,
    "fixtures": cmd_fixtures,
}


def _add_common(parser: argparse.ArgumentParser, *, top: bool) -> None:
    default = None if top else argparse.SUPPRESS
    parser.add_argument(
        "-v", "--verbose", action="count",
        default=0 if top else argparse.SUPPRESS,
        help="INFO logging; repeat for DEBUG",
    )
    fmt = parser.add_mutually_exclusive_group()
    for flag in ("json", "markdown", "html"):
        fmt.add_argument(f"--{flag}", dest="output", action="store_const",
                         const=flag, default=default,
                         help=f"print the {flag} report")


def build_parser() -> argparse.ArgumentParser:
    """
    The argument parser of every command.

    :return: The parser.
    :rtype: argparse.ArgumentParser
    """
    parser = argparse.ArgumentParser(
        prog="topcorr",
        description="Topological graphs, their correspondences and "
                    "explicit unitary equivalences.",
    )
    _add_common(parser, top=True)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _add_common(common, top=False)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("validate", "check the graph axioms")
    p.add_argument("graph")

    p = add("characters", "character fiber over a base point")
    p.add_argument("graph")
    p.add_argument("--vertex", required=True,
                   help="vertex id or segment:t")
    p.add_argument("--z", help="comma-separated ball coordinates")

    p = add("nestrep", "nest representations over a vertex pair")
    p.add_argument("graph")
    p.add_argument("--pair", required=True, help="v,w")

    p = add("fock", "truncated Fock matrix of an element")
    p.add_argument("graph")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--element", required=True)

    p = add("conjugacy", "decide or verify local conjugacy")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--certificate")
    p.add_argument("--out", help="write the certificate found")

    p = add("cover", "build and check an admissible cover")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--certificate", required=True)
    p.add_argument("--out", help="write the cover")

    p = add("equivalence", "build and verify the unitary equivalence")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--certificate", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--csv", help="write per-sample residuals")

    p = add("fixtures", "write the fixture corpus")
    p.add_argument("outdir")
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:  # noqa: PLR2004
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _emit(command: str, report: Report, output: str | None) -> None:
    if output in (None, "json"):
        print(dumps(report))  # noqa: T201
        return
    md_text = render_report_md(command, report)
    if output == "markdown":
        print(md_text)  # noqa: T201
    else:
        print(render_markdown_to_html(  # noqa: T201
            md_text, REPORT_REGISTRY[command]["title"]))


def main(argv: Sequence[str] | None = None) -> int:
    """
    Run one command.

    :param argv: Arguments without the program name; ``sys.argv`` if None.
    :type argv: Sequence[str] | None
    :return: 0 on success, 2 for schema errors, 3 for failed
        preconditions, 4 for exhausted budgets and 1 otherwise.
    :rtype: int
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        report = COMMANDS[args.command](args)
    except CommandFailedError as exc:
        _emit(args.command, exc.report, args.output)
        return exc.code
    except TopcorrError as exc:
        if args.verbose >= 2:  # noqa: PLR2004
            _LOGGER.exception("%s failed", args.command)
        print(f"topcorr {args.command}: {exc}", file=sys.stderr)  # noqa: T201
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001
        if args.verbose >= 2:  # noqa: PLR2004
            _LOGGER.exception("%s failed", args.command)
        print(f"topcorr {args.command}: unexpected error: {exc}",  # noqa: T201
              file=sys.stderr)
        return 1
    _emit(args.command, report, args.output)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
