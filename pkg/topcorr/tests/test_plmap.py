"""Tests for topcorr.core.space.plmap."""

from collections.abc import Callable
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topcorr.core.errors import DegeneratePieceError, InvalidMapError
from topcorr.core.space.complex import Complex1, Point
from topcorr.core.space.plmap import Piece, PLMap
from topcorr.services.fixtures import (
    CERTIFICATE_FIXTURES,
    circle_e,
    clamp_map,
    dkflip_e,
    fold_map,
    left_fold_map,
    max_map,
    min_map,
    right_fold_map,
    rotation_map,
    self_map,
    tent_map,
    unit_interval,
)

def test_identity_evaluates_to_itself(unit: Complex1) -> None:
    """Test that the identity fixes vertices and interior points."""
    ident = PLMap.identity(unit)
    for p in unit.sample_points(3):
        assert ident(p) == p


def test_clamp_collapses_outer_thirds() -> None:
    """Test that clamp is constant on the outer segments."""
    clamp = clamp_map()
    assert clamp(Point.on(0, Fraction(1, 2))) == Point.at("1/3")
    assert clamp(Point.on(1, Fraction(1, 4))) == Point.on(1, Fraction(1, 4))
    assert clamp(Point.at("1")) == Point.at("2/3")


def test_fold_preimage_has_three_sheets() -> None:
    """Test that a middle point has one preimage per segment under the fold."""
    pre = fold_map().preimage(Point.on(1, Fraction(1, 2)))
    assert pre == (
        Point.on(0, Fraction(1, 2)),
        Point.on(1, Fraction(1, 2)),
        Point.on(2, Fraction(1, 2)),
    )


def test_preimage_through_constant_piece_raises() -> None:
    """Test that a collapsed interval makes the preimage degenerate."""
    with pytest.raises(DegeneratePieceError):
        clamp_map().preimage(Point.at("1/3"))


def test_discontinuous_map_is_rejected(unit: Complex1) -> None:
    """Test that pieces must meet the vertex images."""
    with pytest.raises(InvalidMapError, match="segment 2"):
        self_map(
            unit,
            {"0": "0", "1/3": "1/3", "2/3": "2/3", "1": "1"},
            [Piece.affine(0, 0, 1), Piece.affine(1, 0, 1),
             Piece.affine(1, 0, 1)],
        )


def test_local_homeomorphism_report() -> None:
    """Test the verdicts for a homeomorphism, a fold and a constant piece."""
    assert rotation_map().is_local_homeomorphism()
    fold = fold_map().local_homeomorphism_report()
    assert not fold.ok
    assert "fold" in fold.reason
    clamp = clamp_map().local_homeomorphism_report()
    assert not clamp.ok
    assert clamp.reason == "constant piece"


def test_inverse_undoes_rotation(circle: Complex1) -> None:
    """Test that the inverse of the rotation is a two-sided inverse."""
    rot = rotation_map()
    inv = rot.inverse()
    for p in circle.sample_points(5):
        assert inv(rot(p)) == p
        assert rot(inv(p)) == p


def test_compose_applies_inner_first(circle: Complex1) -> None:
    """Test that three rotations by a third give the identity."""
    rot = rotation_map()
    full = rot.compose(rot).compose(rot)
    for p in circle.sample_points(4):
        assert full(p) == p
    assert rot.compose(rot)(Point.at("0")) == Point.at("2/3")


def test_germ_image_reverses_on_folded_piece() -> None:
    """Test that a decreasing piece flips the direction of a germ."""
    fold = fold_map()
    (germ,) = fold.source.germs(Point.at("0"))
    image = fold.germ_image(germ)
    assert image is not None
    assert image.segment == 1
    assert image.t == 1
    assert image.sign == -1
    (flat,) = clamp_map().source.germs(Point.at("0"))
    assert clamp_map().germ_image(flat) is None


@pytest.mark.parametrize("name", sorted(CERTIFICATE_FIXTURES))
def test_fixture_base_maps_invert(name: str) -> None:
    """Test that every certificate's tau composed with its inverse is 1."""
    tau = CERTIFICATE_FIXTURES[name]().tau
    back = tau.inverse().compose(tau)
    for p in tau.source.sample_points(6):
        assert back(p) == p


MAPS: dict[str, Callable[[], PLMap]] = {
    "identity": lambda: PLMap.identity(unit_interval()),
    "rotation": rotation_map,
    "clamp": clamp_map,
    "min": min_map,
    "max": max_map,
    "fold": fold_map,
    "right_fold": right_fold_map,
    "left_fold": left_fold_map,
    "tent": tent_map,
    "dkflip_s": lambda: dkflip_e().s,
    "circle_s": lambda: circle_e().s,
}

OPEN_PIECES = ("identity", "rotation", "fold", "right_fold", "tent",
               "dkflip_s", "circle_s")

EPS = Fraction(1, 1000)


def _sampled_local_homeomorphism(m: PLMap) -> bool:
    for p in (*m.critical_points(), *m.source.sample_points(5)):
        centre = m(p)
        nearby = [m(m.source.point(g.segment, g.t + g.sign * EPS))
                  for g in m.source.germs(p)]
        if centre in nearby or len(set(nearby)) != len(nearby):
            return False
        if len(nearby) != len(m.target.germs(centre)):
            return False
    return True


def test_tent_folds_at_the_midpoint() -> None:
    """Test that t -> |2t - 1| fails with the fold at t = 1/2."""
    report = tent_map().local_homeomorphism_report()
    assert not report.ok
    assert report.counterexample == Point.on(0, Fraction(1, 2))
    assert report.reason.startswith("fold")


def test_fold_witness_wins_over_openness() -> None:
    """Test that a fold is reported even when a vertex is also not open."""
    report = fold_map().local_homeomorphism_report()
    assert report.reason.startswith("fold")
    assert report.counterexample == Point.at("1/3")


@pytest.mark.parametrize("name", sorted(MAPS))
def test_local_homeomorphism_matches_sampling(name: str) -> None:
    """Test the verdict against injectivity on sampled neighbourhoods."""
    m = MAPS[name]()
    assert m.is_local_homeomorphism() == _sampled_local_homeomorphism(m)


@pytest.mark.parametrize("name", OPEN_PIECES)
@settings(max_examples=25, deadline=None)
@given(t=st.fractions(min_value=0, max_value=1, max_denominator=60))
def test_preimage_contains_the_point(name: str, t: Fraction) -> None:
    """Test that every point lies in the preimage of its image."""
    m = MAPS[name]()
    points = [Point.at(v) for v in m.source.vertices]
    if 0 < t < 1:
        points.extend(Point.on(j, t) for j in range(len(m.source.segments)))
    for p in points:
        assert p in m.preimage(m(p))
