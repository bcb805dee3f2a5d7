"""Local conjugacy certificates and their verification."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from topcorr.core.graph import CheckResult, TopGraph
from topcorr.core.space.partition import Cover
from topcorr.core.space.plmap import PLMap
from topcorr.core.space.region import (
    Region,
    image_region,
    maps_agree_on,
    preimage_region,
)

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CertificatePiece:
    """An open ``U`` of ``E0`` and an intertwiner over it.

    ``gamma`` is stored as a global PL map ``E1 -> F1``; only its
    restriction to ``s_E^-1(U)`` is constrained.
    """

    region: Region
    gamma: PLMap
    gamma_inverse: PLMap


@dataclass(frozen=True, eq=False)
class ConjugacyCertificate:
    """A base homeomorphism ``tau`` and local intertwiners."""

    tau: PLMap
    tau_inverse: PLMap
    pieces: tuple[CertificatePiece, ...]


@dataclass(frozen=True)
class CertificateReport:
    """Per-equation verdicts of a certificate."""

    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.ok)


def _agree(name: str, left: PLMap, right: PLMap, region: Region) -> CheckResult:
    witness = maps_agree_on(left, right, region)
    return CheckResult(
        name=name,
        ok=witness is None,
        witness=None if witness is None else str(witness),
        detail="" if witness is None else f"{left(witness)} != "
        f"{right(witness)}",
    )


def verify_certificate(
    source: TopGraph,
    target: TopGraph,
    cert: ConjugacyCertificate,
) -> CertificateReport:
    """
    Check every equation of a local conjugacy certificate.

    Equalities of PL maps are decided exactly on the cells cut by all
    breakpoints, so each failure carries a witness point.

    :param source: The graph ``E``.
    :type source: TopGraph
    :param target: The graph ``F``.
    :type target: TopGraph
    :param cert: The certificate.
    :type cert: ConjugacyCertificate
    :return: The report.
    :rtype: CertificateReport
    """
    tau, tau_inv = cert.tau, cert.tau_inverse
    checks = []
    shapes_ok = (
        tau.source == source.base and tau.target == target.base
        and tau_inv.source == target.base and tau_inv.target == source.base
    )
    checks.append(
        CheckResult(name="tau_domain", ok=shapes_ok,
                    detail="" if shapes_ok else "tau is not E0 -> F0"),
    )
    if not shapes_ok:
        return CertificateReport(checks=tuple(checks))
    checks.append(
        _agree("tau_inverse_left", tau_inv.compose(tau),
               PLMap.identity(source.base), Region.whole(source.base)),
    )
    checks.append(
        _agree("tau_inverse_right", tau.compose(tau_inv),
               PLMap.identity(target.base), Region.whole(target.base)),
    )
    regions = [piece.region for piece in cert.pieces]
    missing = Cover.of(source.base, regions).uncovered_point()
    checks.append(
        CheckResult(
            name="covering",
            ok=missing is None,
            witness=None if missing is None else str(missing),
        ),
    )
    s_e, r_e = source.source_map, source.range_map
    s_f, r_f = target.source_map, target.range_map
    for index, piece in enumerate(cert.pieces):
        prefix = f"piece_{index}"
        checks.append(
            CheckResult(name=f"{prefix}_open", ok=piece.region.is_open()),
        )
        gamma, gamma_inv = piece.gamma, piece.gamma_inverse
        if not (gamma.source == source.edges and gamma.target == target.edges
                and gamma_inv.source == target.edges
                and gamma_inv.target == source.edges):
            checks.append(
                CheckResult(name=f"{prefix}_gamma_domain", ok=False,
                            detail="gamma is not E1 -> F1"),
            )
            continue
        over = preimage_region(s_e, piece.region)
        over_target = preimage_region(
            s_f, preimage_region(tau_inv, piece.region),
        )
        checks.append(
            _agree(f"{prefix}_gamma_inverse_left", gamma_inv.compose(gamma),
                   PLMap.identity(source.edges), over),
        )
        checks.append(
            _agree(f"{prefix}_gamma_inverse_right", gamma.compose(gamma_inv),
                   PLMap.identity(target.edges), over_target),
        )
        image = image_region(gamma, over)
        onto = image == over_target
        checks.append(
            CheckResult(
                name=f"{prefix}_gamma_onto",
                ok=onto,
                witness=None if onto else str(
                    (image.union(over_target).difference(
                        image.intersection(over_target),
                    )).sample_point(),
                ),
            ),
        )
        checks.append(
            _agree(f"{prefix}_s_intertwining", s_f.compose(gamma),
                   tau.compose(s_e), over),
        )
        checks.append(
            _agree(f"{prefix}_r_intertwining", r_f.compose(gamma),
                   tau.compose(r_e), over),
        )
    report = CertificateReport(checks=tuple(checks))
    _LOGGER.info("certificate with %d pieces: ok=%s", len(cert.pieces),
                 report.ok)
    return report


def invert_certificate(cert: ConjugacyCertificate) -> ConjugacyCertificate:
    """
    The certificate of ``F`` against ``E``.

    :param cert: A certificate of ``E`` against ``F``.
    :type cert: ConjugacyCertificate
    :return: Pieces ``tau(U)`` with ``gamma`` and its inverse exchanged.
    :rtype: ConjugacyCertificate
    """
    return ConjugacyCertificate(
        tau=cert.tau_inverse,
        tau_inverse=cert.tau,
        pieces=tuple(
            CertificatePiece(
                region=preimage_region(cert.tau_inverse, piece.region),
                gamma=piece.gamma_inverse,
                gamma_inverse=piece.gamma,
            )
            for piece in cert.pieces
        ),
    )


def identity_certificate(graph: TopGraph) -> ConjugacyCertificate:
    """``tau = id`` and a single piece ``U = E0`` with ``gamma = id``."""
    identity_edges = PLMap.identity(graph.edges)
    return ConjugacyCertificate(
        tau=PLMap.identity(graph.base),
        tau_inverse=PLMap.identity(graph.base),
        pieces=(
            CertificatePiece(
                region=Region.whole(graph.base),
                gamma=identity_edges,
                gamma_inverse=identity_edges,
            ),
        ),
    )
