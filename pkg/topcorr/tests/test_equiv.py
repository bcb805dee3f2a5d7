"""Tests for topcorr.core.equiv: regluing, flips and the verified chain."""

import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from topcorr.core.constants import CUT_LEVEL_CANDIDATES, RESIDUAL_TOLERANCE
from topcorr.core.corr import CorrVector
from topcorr.core.cover.admissible import (
    build_admissible_cover,
    check_admissible,
)
from topcorr.core.cover.certificate import (
    ConjugacyCertificate,
    identity_certificate,
    verify_certificate,
)
from topcorr.core.equiv import (
    ComposedUnitary,
    FlipSpec,
    FlipUnitary,
    PullbackUnitary,
    full_equivalence,
    verify_unitary,
)
from topcorr.core.equiv.regluing import cut_level
from topcorr.core.equiv.verify import random_vector
from topcorr.core.errors import CoverError, FlipSpecError, GraphMismatchError
from topcorr.core.graph import TopGraph
from topcorr.core.space.field import ScalarField
from topcorr.services.fixtures import dkflip_e, flip_system

Triple = tuple[TopGraph, TopGraph, ConjugacyCertificate]

SAMPLES = 2000


def test_dkflip_needs_one_flip(dkflip: Triple) -> None:
    """Test the chain of the identity and clamp system against min and max."""
    chain = full_equivalence(*dkflip)
    assert chain.flips == 1
    assert isinstance(chain.steps[0], FlipUnitary)
    assert isinstance(chain.steps[-1], PullbackUnitary)
    assert len(chain.graphs) == 2
    assert chain.graphs[1].validate().ok


def test_dkflip_unitary_verifies(dkflip: Triple) -> None:
    """Test that every residual of the DKFLIP unitary is negligible."""
    report = verify_unitary(full_equivalence(*dkflip).unitary,
                            samples=SAMPLES, seed=7)
    assert report.isometry <= RESIDUAL_TOLERANCE
    assert report.left_module <= RESIDUAL_TOLERANCE
    assert report.right_module <= RESIDUAL_TOLERANCE
    assert report.continuity <= RESIDUAL_TOLERANCE
    assert report.ok()
    assert len(report.rows) == SAMPLES


def test_wrong_top_angle_trips_the_continuity_residual(
    dkflip: Triple,
) -> None:
    """Test that a flip stopping at pi/3 fails on the continuity residual."""
    chain = full_equivalence(*dkflip)
    flip = chain.steps[0]
    assert isinstance(flip, FlipUnitary)
    bent = FlipUnitary(flip.cover, replace(flip.spec,
                                           upper_angle=math.pi / 3))
    report = verify_unitary(ComposedUnitary([bent, *chain.steps[1:]]),
                            samples=50, seed=7)
    assert report.continuity > 1e-3
    assert not report.ok()


def test_verification_is_reproducible(dkflip: Triple) -> None:
    """Test that the same seed gives the same residual rows."""
    unitary = full_equivalence(*dkflip).unitary
    first = verify_unitary(unitary, samples=20, seed=3)
    second = verify_unitary(unitary, samples=20, seed=3)
    assert first.rows == second.rows


def test_cycle3_needs_two_flips(cycle3: Triple) -> None:
    """Test that a 3-cycle of sheets is undone by two transpositions."""
    source, target, cert = cycle3
    chain = full_equivalence(source, target, cert)
    assert chain.flips == 2
    final = chain.final_cover
    assert final.source_permutations() == final.target_permutations()
    report = verify_unitary(chain.unitary, samples=SAMPLES, seed=11)
    assert report.ok()


def test_identity_chain_is_a_single_pullback() -> None:
    """Test that a graph against itself needs no flips and still verifies."""
    graph = dkflip_e()
    chain = full_equivalence(graph, graph, identity_certificate(graph))
    assert chain.flips == 0
    assert chain.unitary.flips == 0
    assert verify_unitary(chain.unitary, samples=50, seed=5).ok()


def test_apply_samples_the_image(dkflip: Triple) -> None:
    """Test that apply lands on F and agrees with value_at on the grid."""
    source, target, _ = dkflip
    unitary = full_equivalence(*dkflip).unitary
    x = CorrVector(source, random_vector(source.edges,
                                         np.random.default_rng(0)))
    image = unitary.apply(x, per_segment=8)
    assert image.graph == target
    for a in target.edges.sample_points(8):
        assert complex(image(a)) == pytest.approx(unitary.value_at(x, a),
                                                  abs=1e-12)


def test_apply_rejects_foreign_vectors(dkflip: Triple) -> None:
    """Test that a vector on F cannot be pushed through X(E) -> X(F)."""
    _, target, _ = dkflip
    unitary = full_equivalence(*dkflip).unitary
    with pytest.raises(GraphMismatchError):
        unitary.apply(CorrVector.constant(target))


def test_flip_spec_must_match_the_defect(dkflip: Triple) -> None:
    """Test that a flip on sets that do not differ is refused."""
    chain = full_equivalence(*dkflip)
    with pytest.raises(FlipSpecError):
        FlipUnitary(chain.final_cover, FlipSpec(0, 1, 0, 1))


def test_cut_level_avoids_knot_values() -> None:
    """Test that the cut level is never a knot value."""
    space = dkflip_e().base
    f = ScalarField.piecewise_linear(space, {"1/3": 1}, {})
    level = cut_level(f)
    assert level not in set(f.knot_values())
    assert 0 < level < 1


def test_cut_level_exhausted() -> None:
    """Test the error when every candidate is taken."""
    space = dkflip_e().base
    interior = {0: {Fraction(k + 1, len(CUT_LEVEL_CANDIDATES) + 2): c
                    for k, c in enumerate(CUT_LEVEL_CANDIDATES)}}
    f = ScalarField.piecewise_linear(space, {}, interior)
    with pytest.raises(CoverError):
        cut_level(f)


SHAPES = ("id", "clamp", "fold")


@pytest.mark.parametrize("seed", range(20))
def test_random_flip_systems_verify(seed: int) -> None:
    """Test certificate, cover and unitary on a randomly shuffled system."""
    rng = np.random.default_rng(seed)
    copies = int(rng.integers(2, 4))
    branches = [(SHAPES[int(rng.integers(3))], SHAPES[int(rng.integers(3))])
                for _ in range(copies)]
    perm = [int(k) for k in rng.permutation(copies)]
    source, target, cert = flip_system(f"RANDOM{seed}", branches, perm)
    assert verify_certificate(source, target, cert).ok
    cover = build_admissible_cover(source, target, cert)
    assert check_admissible(source, target, cover).ok
    chain = full_equivalence(source, target, cert)
    final = chain.final_cover
    assert final.source_permutations() == final.target_permutations()
    assert verify_unitary(chain.unitary, samples=200, seed=seed).ok()
