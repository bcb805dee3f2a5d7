"""Two-dimensional nest representations and their diagonalization."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np

from topcorr.core.constants import (
    BALL_TOLERANCE,
    DEFAULT_SEED,
    RESIDUAL_TOLERANCE,
)
from topcorr.core.errors import (
    CoverError,
    EmptyFiberError,
    PointError,
    TriangularizationError,
    WeightBoundError,
    ZeroWeightsError,
)
from topcorr.core.graph import TopGraph, edges_between, require_same_graph
from topcorr.core.space.field import ScalarField
from topcorr.core.space.partition import separating_function
from topcorr.core.space.region import Region, image_region

if TYPE_CHECKING:
    from collections.abc import Callable, Mapping, Sequence

    from topcorr.core.corr import CorrVector
    from topcorr.core.fock import AlgebraElement
    from topcorr.core.space.complex import Complex1, Point

_LOGGER = logging.getLogger(__name__)


def _upper(diagonal: tuple[complex, complex], corner: complex) -> np.ndarray:
    return np.array([[diagonal[0], corner], [0, diagonal[1]]], dtype=complex)


def _evaluate(
    element: AlgebraElement,
    left: Point,
    right: Point,
    corner: Callable[[CorrVector], complex],
) -> np.ndarray:
    """
    Upper-triangular value of a covariant pair on a polynomial element.

    ``pi(f) = diag(f(left), f(right))`` and ``t(x)`` is the strict corner
    ``corner(x)``; products of two or more strict corners vanish.
    """
    f = element.expectation()
    out = _upper((complex(f(left)), complex(f(right))), 0j)
    for u in element.tensors:
        if u.degree != 1:
            continue
        for term in u.terms:
            out[0, 1] += complex(term.coefficient) * corner(term.factors[0])
    return out


@dataclass(frozen=True, eq=False)
class NestRep:
    """The nest representation over ``(v, w)`` with edge weights."""

    graph: TopGraph
    v: Point
    w: Point
    weights: Mapping[Point, complex] = field(default_factory=dict)

    def corner(self, x: CorrVector) -> complex:
        """``sum_e lambda_e x(e)``."""
        return sum((lam * complex(x(e)) for e, lam in self.weights.items()),
                   0j)


def build_nest_rep(
    graph: TopGraph,
    v: Point,
    w: Point,
    weights: Mapping[Point, complex] | None = None,
) -> NestRep:
    """
    Nest representation ``pi(f) = diag(f(v), f(w))``, ``t(x)`` in the corner.

    :param graph: The graph.
    :type graph: TopGraph
    :param v: Range point.
    :type v: Point
    :param w: Source point.
    :type w: Point
    :param weights: ``lambda`` on the fiber; uniform ``1/n`` by default.
    :type weights: Mapping[Point, complex] | None
    :raises EmptyFiberError: If no edge goes from ``w`` to ``v``.
    :raises ZeroWeightsError: If all weights vanish.
    :raises WeightBoundError: If ``sum |lambda_e| > 1``.
    :raises PointError: If a weight sits off the fiber.
    :return: The representation.
    :rtype: NestRep
    """
    fiber = edges_between(graph, v, w)
    if fiber.n == 0:
        msg = f"no edges between {v} and {w}: the nest family is empty"
        raise EmptyFiberError(msg)
    if weights is None:
        weights = dict.fromkeys(fiber.edges, complex(1 / fiber.n))
    stray = [str(e) for e in weights if e not in fiber.edges]
    if stray:
        msg = f"weights on edges outside the fiber: {stray}"
        raise PointError(msg)
    total = sum(abs(complex(lam)) for lam in weights.values())
    if total == 0:
        msg = "all weights are zero"
        raise ZeroWeightsError(msg)
    if total > 1 + BALL_TOLERANCE:
        msg = f"weights sum to {total} > 1"
        raise WeightBoundError(msg)
    return NestRep(graph=graph, v=v, w=w,
                   weights={e: complex(lam) for e, lam in weights.items()})


def eval_nest_rep(rho: NestRep, element: AlgebraElement) -> np.ndarray:
    """
    Value of a nest representation on a polynomial element.

    :param rho: The representation.
    :type rho: NestRep
    :param element: The element.
    :type element: AlgebraElement
    :return: A 2x2 upper-triangular matrix.
    :rtype: numpy.ndarray
    """
    require_same_graph(rho.graph, element.graph)
    return _evaluate(element, rho.v, rho.w, rho.corner)


@dataclass(frozen=True)
class DiagonalityReport:
    """Corner value of ``t(x)`` and whether ``x`` vanishes on the fiber."""

    diagonal: bool
    corner: complex
    support_off_fiber: bool


def diagonality_check(rho: NestRep, x: CorrVector) -> DiagonalityReport:
    """
    Whether ``rho(t(x))`` is diagonal, with the support hypothesis.

    :param rho: The representation.
    :type rho: NestRep
    :param x: The vector.
    :type x: CorrVector
    :return: The report.
    :rtype: DiagonalityReport
    """
    require_same_graph(rho.graph, x.graph)
    fiber = edges_between(rho.graph, rho.v, rho.w)
    corner = rho.corner(x)
    return DiagonalityReport(
        diagonal=corner == 0,
        corner=corner,
        support_off_fiber=all(x(e) == 0 for e in fiber.edges),
    )


@dataclass(frozen=True, eq=False)
class RhoFamily:
    """
    ``v -> [[delta_sigma(v), sum z_i delta_e_i(v)], [0, delta_v]]`` over ``W``.

    ``e_i(v)`` is the point of sheet ``i`` over ``v`` and ``sigma(v)`` is
    ``r(e_1(v))``.
    """

    graph: TopGraph
    region: Region
    sheets: tuple[Region, ...]
    z: tuple[complex, ...]

    @property
    def norm_bound(self) -> float:
        """``1 + ||z||_2``."""
        return 1 + math.sqrt(sum(abs(c) ** 2 for c in self.z))

    def sheet_points(self, v: Point) -> tuple[Point, ...]:
        """
        The sheet points ``e_i(v)``.

        :param v: Point of ``W``.
        :type v: Point
        :raises CoverError: If ``v`` is outside ``W`` or a sheet misses it.
        :return: One point per sheet.
        :rtype: tuple[Point, ...]
        """
        if not self.region.contains(v):
            msg = f"{v} is outside the family's region"
            raise CoverError(msg)
        fiber = self.graph.source_map.preimage(v)
        out = []
        for k, sheet in enumerate(self.sheets):
            found = [e for e in fiber if sheet.contains(e)]
            if len(found) != 1:
                msg = f"sheet {k} has {len(found)} points over {v}"
                raise CoverError(msg)
            out.append(found[0])
        return tuple(out)

    def sigma(self, v: Point) -> Point:
        return self.graph.range_map(self.sheet_points(v)[0])

    def evaluate(self, v: Point, element: AlgebraElement) -> np.ndarray:
        """
        ``rho_{v,z}`` on a polynomial element.

        :param v: Point of ``W``.
        :type v: Point
        :param element: The element.
        :type element: AlgebraElement
        :return: A 2x2 upper-triangular matrix.
        :rtype: numpy.ndarray
        """
        require_same_graph(self.graph, element.graph)
        points = self.sheet_points(v)

        def corner(x: CorrVector) -> complex:
            return sum((c * complex(x(e)) for c, e in zip(self.z, points,
                                                          strict=True)), 0j)

        return _evaluate(element, self.graph.range_map(points[0]), v, corner)


def rho_family(
    graph: TopGraph,
    region: Region,
    sheets: Sequence[Region],
    z: Sequence[complex],
) -> RhoFamily:
    """
    The family ``rho_{v,z}`` for ``v`` in an evenly covered region.

    :param graph: The graph.
    :type graph: TopGraph
    :param region: Open region ``W`` of the base.
    :type region: Region
    :param sheets: Edge regions, each mapped homeomorphically onto ``W``.
    :type sheets: Sequence[Region]
    :param z: One coefficient per sheet.
    :type z: Sequence[complex]
    :raises CoverError: If the sheets are not sheets over ``W``, or ``r``
        differs between sheets carrying a nonzero coefficient.
    :return: The family.
    :rtype: RhoFamily
    """
    if len(z) != len(sheets):
        msg = f"{len(z)} coefficients for {len(sheets)} sheets"
        raise CoverError(msg)
    s = graph.source_map
    for k, sheet in enumerate(sheets):
        if image_region(s, sheet) != region:
            msg = f"sheet {k} does not map onto the region"
            raise CoverError(msg)
    family = RhoFamily(graph=graph, region=region, sheets=tuple(sheets),
                       z=tuple(complex(c) for c in z))
    probes = [p for comp in region.components()
              for p in [comp.sample_point(), *comp.boundary_points()]
              if p is not None and region.contains(p)]
    for v in probes:
        points = family.sheet_points(v)
        ranges = {graph.range_map(e)
                  for c, e in zip(family.z, points, strict=True) if c != 0}
        ranges.add(graph.range_map(points[0]))
        if len(ranges) > 1:
            msg = f"range maps of weighted sheets differ over {v}"
            raise CoverError(msg)
    return family


@dataclass(frozen=True)
class Diagonalization:
    """``A = [[1, beta], [0, 1]]`` conjugating the restriction to diagonal."""

    matrix: np.ndarray = field(compare=False)
    inverse: np.ndarray = field(compare=False)
    beta: complex
    max_residual: float
    norm_bound: float
    within_bound: bool


def _random_field(space: Complex1, rng: np.random.Generator) -> ScalarField:
    vertex_values = {v: float(rng.uniform(-1, 1)) for v in space.vertices}
    interior = {
        j: {Fraction(k, 4): float(rng.uniform(-1, 1)) for k in (1, 2, 3)}
        for j in range(len(space.segments))
    }
    return ScalarField.piecewise_linear(space, vertex_values, interior)


def diagonalize_nest_rep(
    base: Complex1,
    u: Point,
    v: Point,
    corner: Callable[[ScalarField], complex],
    seed: int = DEFAULT_SEED,
    checks: int = 10,
) -> Diagonalization:
    """
    Diagonalize ``f -> [[f(u), corner(f)], [0, f(v)]]`` on ``C(E0)``.

    ``beta`` solves ``corner(f) = beta (f(u) - f(v))`` on a separating
    function and is verified on seeded random PL fields.

    :param base: The base complex.
    :type base: Complex1
    :param u: First diagonal point.
    :type u: Point
    :param v: Second diagonal point.
    :type v: Point
    :param corner: The corner functional.
    :type corner: Callable[[ScalarField], complex]
    :param seed: Seed of the verification fields.
    :type seed: int
    :param checks: Number of verification fields.
    :type checks: int
    :raises TriangularizationError: If no such ``beta`` exists.
    :return: The conjugating matrix and its verification.
    :rtype: Diagonalization
    """
    rng = np.random.default_rng(seed)
    if u == v:
        beta = 0j
        hat = ScalarField.constant(base, 1)
    else:
        hat = separating_function(base, Region.point(base, u),
                                  Region.point(base, v))
        beta = complex(corner(hat))
    residual = 0.0
    for _ in range(checks):
        f = _random_field(base, rng)
        expected = beta * (complex(f(u)) - complex(f(v)))
        residual = max(residual, abs(complex(corner(f)) - expected))
    if residual > RESIDUAL_TOLERANCE:
        msg = (
            f"corner is not a multiple of f(u) - f(v) "
            f"(residual {residual:.3e})"
        )
        raise TriangularizationError(msg)
    matrix = np.array([[1, beta], [0, 1]], dtype=complex)
    inverse = np.array([[1, -beta], [0, 1]], dtype=complex)
    rep_norm = float(np.linalg.norm(
        _upper((complex(hat(u)), complex(hat(v))), complex(corner(hat))), 2,
    ))
    bound = 1 + rep_norm
    worst = max(float(np.linalg.norm(matrix, 2)),
                float(np.linalg.norm(inverse, 2)))
    _LOGGER.debug("diagonalized with beta=%s (residual %.3e)", beta, residual)
    return Diagonalization(
        matrix=matrix, inverse=inverse, beta=beta, max_residual=residual,
        norm_bound=bound, within_bound=worst <= bound + RESIDUAL_TOLERANCE,
    )
