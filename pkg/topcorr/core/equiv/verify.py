"""Seeded numerical verification of correspondence unitaries."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import numpy as np

from topcorr.core.constants import (
    BOUNDARY_OFFSET,
    DEFAULT_SEED,
    DEFAULT_VERIFY_SAMPLES,
    RESIDUAL_TOLERANCE,
    SAMPLE_DENOMINATOR,
)
from topcorr.core.space.complex import Complex1, Point
from topcorr.core.space.field import ScalarField

if TYPE_CHECKING:
    from topcorr.core.equiv.unitary import CorrUnitary, EdgeFunction

_LOGGER = logging.getLogger(__name__)

_VECTORS = 4

CONTINUITY_NOTE = (
    "continuity is measured at branch boundaries only; agreement on the "
    "open overlaps is sampled, not proved"
)


@dataclass(frozen=True)
class VerificationReport:
    """Largest residuals over the samples, with what reproduces them."""

    isometry: float
    left_module: float
    right_module: float
    continuity: float
    samples: int
    seed: int
    rows: tuple[dict[str, Any], ...] = field(default=(), repr=False)
    note: str = CONTINUITY_NOTE

    def ok(self, tolerance: float = RESIDUAL_TOLERANCE) -> bool:
        return max(self.isometry, self.left_module, self.right_module,
                   self.continuity) <= tolerance


def random_vector(space: Complex1, rng: np.random.Generator) -> ScalarField:
    """A complex PL field with random values at vertices and quarter points."""

    def value() -> complex:
        return complex(rng.uniform(-1, 1), rng.uniform(-1, 1))

    return ScalarField.piecewise_linear(
        space,
        {v: value() for v in space.vertices},
        {j: {Fraction(k, 4): value() for k in (1, 2, 3)}
         for j in range(len(space.segments))},
    )


def random_function(space: Complex1, rng: np.random.Generator) -> ScalarField:
    """A real PL field on the base."""
    return ScalarField.piecewise_linear(
        space,
        {v: Fraction(int(rng.integers(-64, 65)), 64) for v in space.vertices},
        {j: {Fraction(1, 2): Fraction(int(rng.integers(-64, 65)), 64)}
         for j in range(len(space.segments))},
    )


def random_point(space: Complex1, rng: np.random.Generator) -> Point:
    """A vertex, or a segment point with denominator ``2**20``."""
    if space.segments and rng.random() < 0.9:
        j = int(rng.integers(len(space.segments)))
        t = Fraction(int(rng.integers(1, SAMPLE_DENOMINATOR)),
                     SAMPLE_DENOMINATOR)
        return space.point(j, t)
    return Point.at(space.vertices[int(rng.integers(len(space.vertices)))])


def _jump(unitary: CorrUnitary, x: EdgeFunction) -> tuple[float, str]:
    """Largest change of ``Gamma(x)`` across a boundary point."""
    worst, where = 0.0, ""
    edges = unitary.target.edges
    for p in unitary.boundary_points():
        here = unitary.value_at(x, p)
        for germ in edges.germs(p):
            q = edges.point(germ.segment,
                            germ.t + germ.sign * BOUNDARY_OFFSET)
            jump = abs(unitary.value_at(x, q) - here)
            if jump > worst:
                worst, where = jump, str(p)
    return worst, where


def verify_unitary(
    unitary: CorrUnitary,
    samples: int = DEFAULT_VERIFY_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> VerificationReport:
    """
    Measure how far ``Gamma`` is from a unitary bimodule map.

    At random base points ``v`` the isometry residual is
    ``|<Gx, Gx>(tau v) - <x, x>(v)|``; at random edge points ``a`` the
    module residuals compare ``G(x.f)`` with ``G(x) . f(tau^-1)`` and
    ``G(f.x)`` with ``f(tau^-1) . G(x)``.  Continuity is the largest jump
    of ``G(x)`` across every branch boundary of every step.

    :param unitary: The unitary.
    :type unitary: CorrUnitary
    :param samples: Number of base and edge sample points.
    :type samples: int
    :param seed: Seed of the random vectors and points.
    :type seed: int
    :return: The maxima.
    :rtype: VerificationReport
    """
    rng = np.random.default_rng(seed)
    source, target = unitary.source, unitary.target
    pairs = [
        (random_vector(source.edges, rng), random_function(source.base, rng))
        for _ in range(_VECTORS)
    ]
    iso = left = right = 0.0
    rows: list[dict[str, Any]] = []
    for n in range(samples):
        x, f = pairs[n % _VECTORS]
        v = random_point(source.base, rng)
        before = sum(abs(complex(x(e))) ** 2 for e in source.s.preimage(v))
        after = sum(
            abs(unitary.value_at(x, a)) ** 2
            for a in target.s.preimage(unitary.base_map(v))
        )
        a = random_point(target.edges, rng)
        gx = unitary.value_at(x, a)
        f_s = complex(f(unitary.base_inverse(target.s(a))))
        f_r = complex(f(unitary.base_inverse(target.r(a))))
        right_gap = abs(
            unitary.value_at(lambda e, x=x, f=f: x(e) * f(source.s(e)), a)
            - gx * f_s,
        )
        left_gap = abs(
            unitary.value_at(lambda e, x=x, f=f: f(source.r(e)) * x(e), a)
            - f_r * gx,
        )
        iso = max(iso, abs(after - before))
        right, left = max(right, right_gap), max(left, left_gap)
        rows.append({
            "sample": n, "base_point": str(v), "edge_point": str(a),
            "isometry": abs(after - before), "left_module": left_gap,
            "right_module": right_gap,
        })
    continuity = 0.0
    for part in unitary.parts():
        x = random_vector(part.source.edges, rng)
        jump, where = _jump(part, lambda e, x=x: x(e))
        if jump > continuity:
            continuity = jump
            _LOGGER.debug("largest jump %.3e at %s", jump, where)
    report = VerificationReport(
        isometry=iso, left_module=left, right_module=right,
        continuity=continuity, samples=samples, seed=seed, rows=tuple(rows),
    )
    _LOGGER.info(
        "verified over %d samples: isometry %.3e, left %.3e, right %.3e, "
        "continuity %.3e", samples, iso, left, right, continuity,
    )
    return report
