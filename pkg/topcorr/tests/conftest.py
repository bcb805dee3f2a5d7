"""Shared fixtures: the canonical graphs and certificates."""

import pytest

from topcorr.core.cover.certificate import ConjugacyCertificate
from topcorr.core.graph import TopGraph
from topcorr.core.space.complex import Complex1
from topcorr.services import fixtures


@pytest.fixture
def unit() -> Complex1:
    """``[0, 1]`` with vertices at thirds."""
    return fixtures.unit_interval()


@pytest.fixture
def circle() -> Complex1:
    """A circle of three segments."""
    return fixtures.circle()


@pytest.fixture
def d1() -> TopGraph:
    """The discrete graph D1."""
    return fixtures.d1()


@pytest.fixture
def dkflip() -> tuple[TopGraph, TopGraph, ConjugacyCertificate]:
    """DKFLIP_E, DKFLIP_F and their certificate."""
    return (fixtures.dkflip_e(), fixtures.dkflip_f(),
            fixtures.dkflip_certificate())


@pytest.fixture
def cycle3() -> tuple[TopGraph, TopGraph, ConjugacyCertificate]:
    """CYCLE3_E, CYCLE3_F and their certificate."""
    return (fixtures.cycle3_e(), fixtures.cycle3_f(),
            fixtures.cycle3_certificate())


@pytest.fixture
def circle_pair() -> tuple[TopGraph, TopGraph, ConjugacyCertificate]:
    """CIRCLE_E, CIRCLE_F and their certificate."""
    return (fixtures.circle_e(), fixtures.circle_f(),
            fixtures.circle_certificate())
