"""Tests for topcorr.core.cover: certificates, discrete decision, covers."""

from functools import reduce
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topcorr.core.cover.admissible import (
    build_admissible_cover,
    check_admissible,
    sheet_count_components,
)
from topcorr.core.cover.certificate import (
    ConjugacyCertificate,
    identity_certificate,
    invert_certificate,
    verify_certificate,
)
from topcorr.core.cover.discrete import (
    NotConjugate,
    decide_local_conjugacy_discrete,
    fock_intertwines,
)
from topcorr.core.cover.permutations import (
    compose,
    invert,
    is_identity,
    permutation_data,
    sigma_data,
    transposition,
    transpositions,
)
from topcorr.core.errors import CertificateError, CoverError, NotDiscreteError
from topcorr.core.fock import parse_element
from topcorr.core.graph import TopGraph
from topcorr.core.space.region import Region
from topcorr.services.fixtures import (
    circle_e,
    cycle3_e,
    d1_plus,
    d1_relabeled,
    discrete_graph,
    dkflip_certificate,
    dkflip_e,
    dkflip_f,
    swap2,
    unit_interval,
)

Triple = tuple[TopGraph, TopGraph, ConjugacyCertificate]


# -- permutations -----------------------------------------------------


@pytest.mark.parametrize("perm", [(0, 1, 2), (1, 0, 2), (1, 2, 0),
                                  (3, 2, 0, 1), (2, 0, 1, 4, 3)])
def test_transpositions_multiply_back(perm: tuple[int, ...]) -> None:
    """Test that the factors compose to the permutation."""
    factors = [transposition(len(perm), a, b) for a, b in transpositions(perm)]
    identity = tuple(range(len(perm)))
    assert reduce(compose, factors, identity) == perm


def test_transpositions_stay_within_cycles() -> None:
    """Test that a 3-cycle and a fixed point need two factors in the cycle."""
    factors = transpositions((1, 2, 0, 3))
    assert len(factors) == 2
    assert all(3 not in pair for pair in factors)


def test_sigma_is_identity_when_sides_agree() -> None:
    """Test the defect of identical permutation data."""
    data = {(0, 1): (1, 0), (1, 0): (1, 0)}
    assert all(is_identity(p) for p in sigma_data(data, data).values())
    assert sigma_data(data, {(0, 1): (0, 1), (1, 0): (0, 1)})[(0, 1)] == (1, 0)
    assert invert((1, 2, 0)) == (2, 0, 1)


def test_permutation_data_rejects_ambiguous_sheets() -> None:
    """Test that a sheet meeting two sheets is a CoverError."""
    space = unit_interval()
    whole = Region.whole(space)
    with pytest.raises(CoverError, match="meets sheets"):
        permutation_data([whole, whole], [[whole], [whole, whole]])


# -- certificates -----------------------------------------------------


def test_dkflip_certificate_verifies(dkflip: Triple) -> None:
    """Test every equation of the DKFLIP certificate."""
    source, target, cert = dkflip
    report = verify_certificate(source, target, cert)
    assert report.ok, report.failures()
    inverse = invert_certificate(cert)
    assert verify_certificate(target, source, inverse).ok


def test_unswapped_certificate_fails_range_intertwining() -> None:
    """Test that keeping the identity pairing above breaks r there."""
    source, target = dkflip_e(), dkflip_f()
    report = verify_certificate(source, target,
                                dkflip_certificate(swapped=False))
    assert not report.ok
    names = {c.name for c in report.failures()}
    assert "piece_1_r_intertwining" in names
    assert all(c.witness for c in report.failures())
    with pytest.raises(CertificateError):
        build_admissible_cover(source, target,
                               dkflip_certificate(swapped=False))


def test_identity_certificate(d1: TopGraph) -> None:
    """Test that every graph is locally conjugate to itself."""
    assert verify_certificate(d1, d1, identity_certificate(d1)).ok
    graph = dkflip_e()
    assert verify_certificate(graph, graph, identity_certificate(graph)).ok


# -- discrete decision ------------------------------------------------


def test_relabeled_graph_is_conjugate(d1: TopGraph) -> None:
    """Test that swapping vertex names is found and certified."""
    target = d1_relabeled()
    cert = decide_local_conjugacy_discrete(d1, target)
    assert isinstance(cert, ConjugacyCertificate)
    assert verify_certificate(d1, target, cert).ok
    element = parse_element(d1, "2*pi(a) + t(e2) + (1-1j)*t(e2,e1)")
    assert fock_intertwines(d1, target, cert, element, 3) == 0


def test_extra_loop_is_not_conjugate(d1: TopGraph) -> None:
    """Test that D1 and D1plus differ in their edge counts."""
    verdict = decide_local_conjugacy_discrete(d1, d1_plus())
    assert isinstance(verdict, NotConjugate)
    assert verdict.reason == "edge counts differ"


def test_invariants_reject_same_sized_graphs() -> None:
    """Test graphs with equal sizes but different loop structure."""
    loops = discrete_graph("L", ["a", "b"], {"e": ("a", "a"),
                                             "f": ("b", "b")})
    cycle = discrete_graph("C", ["a", "b"], {"e": ("a", "b"),
                                             "f": ("b", "a")})
    verdict = decide_local_conjugacy_discrete(loops, cycle)
    assert isinstance(verdict, NotConjugate)
    assert verdict.reason == "loop and degree invariants differ"
    assert isinstance(decide_local_conjugacy_discrete(loops, swap2()),
                      NotConjugate)


def test_pl_graphs_are_not_decided() -> None:
    """Test that the discrete decision refuses PL graphs."""
    with pytest.raises(NotDiscreteError):
        decide_local_conjugacy_discrete(dkflip_e(), dkflip_f())


def _oracle(source: TopGraph, target: TopGraph) -> bool:
    """Brute force over every vertex bijection comparing edge counts."""
    def counts(graph: TopGraph) -> dict[tuple[str, str], int]:
        out: dict[tuple[str, str], int] = {}
        for e in graph.edges.vertices:
            key = (graph.s.vertex_images[e].vertex or "",
                   graph.r.vertex_images[e].vertex or "")
            out[key] = out.get(key, 0) + 1
        return out

    if len(source.base.vertices) != len(target.base.vertices):
        return False
    c_e, c_f = counts(source), counts(target)
    for image in permutations(target.base.vertices):
        tau = dict(zip(source.base.vertices, image, strict=True))
        moved = {(tau[v], tau[w]): n for (v, w), n in c_e.items()}
        if moved == c_f:
            return True
    return False


@st.composite
def _discrete_graphs(draw: st.DrawFn, name: str) -> TopGraph:
    n = draw(st.integers(min_value=1, max_value=4))
    vertices = [f"v{k}" for k in range(n)]
    pairs = draw(st.lists(st.tuples(st.sampled_from(vertices),
                                    st.sampled_from(vertices)),
                          max_size=5))
    return discrete_graph(name, vertices,
                          {f"e{k}": pair for k, pair in enumerate(pairs)})


@st.composite
def _graph_pairs(draw: st.DrawFn) -> tuple[TopGraph, TopGraph]:
    source = draw(_discrete_graphs("E"))
    if draw(st.booleans()):
        return source, draw(_discrete_graphs("F"))
    vertices = list(source.base.vertices)
    image = draw(st.permutations(vertices))
    tau = dict(zip(vertices, image, strict=True))
    edges = {
        e: (tau[source.s.vertex_images[e].vertex or ""],
            tau[source.r.vertex_images[e].vertex or ""])
        for e in source.edges.vertices
    }
    return source, discrete_graph("F", vertices, edges)


@settings(max_examples=500, deadline=None)
@given(_graph_pairs())
def test_discrete_decision_matches_brute_force(
    pair: tuple[TopGraph, TopGraph],
) -> None:
    """Test the decision against the exhaustive oracle."""
    source, target = pair
    verdict = decide_local_conjugacy_discrete(source, target)
    assert isinstance(verdict, ConjugacyCertificate) == _oracle(source, target)
    if isinstance(verdict, ConjugacyCertificate):
        assert verify_certificate(source, target, verdict).ok


# -- admissible covers ------------------------------------------------


def test_sheet_counts_are_constant_on_pl_graphs() -> None:
    """Test that each PL fixture has one clopen part with its copy count."""
    for graph, copies in ((dkflip_e(), 2), (cycle3_e(), 3), (circle_e(), 2)):
        parts = sheet_count_components(graph)
        assert list(parts) == [copies]
        assert parts[copies].complement().is_empty()


def test_dkflip_cover_is_admissible(dkflip: Triple) -> None:
    """Test the six conditions on the DKFLIP cover."""
    source, target, cert = dkflip
    cover = build_admissible_cover(source, target, cert)
    report = check_admissible(source, target, cover)
    assert report.ok, report.failures()
    assert report.conditions() == {f"C{n}": True for n in range(1, 7)}
    assert all(cover.sheet_count(i) == 2 for i in range(len(cover)))
    assert cover.metadata["charts"] in {"certificate pieces", "knot stars"}


def test_dkflip_cover_has_one_transposition(dkflip: Triple) -> None:
    """Test that the two sides differ by exactly one swap overall."""
    source, target, cert = dkflip
    cover = build_admissible_cover(source, target, cert)
    sigma = sigma_data(cover.source_permutations(),
                       cover.target_permutations())
    swaps = sum(len(transpositions(invert(p)))
                for (i, j), p in sigma.items() if i < j)
    assert swaps == 1


def test_gamma_round_trips_over_each_set(dkflip: Triple) -> None:
    """Test that gamma_i and its inverse agree with the sheets."""
    source, target, cert = dkflip
    cover = build_admissible_cover(source, target, cert)
    for i, region in enumerate(cover.sets):
        v = region.sample_point()
        assert v is not None
        for e in source.s.preimage(v):
            a = cover.gamma(i, e)
            assert target.s(a) == cover.tau(v)
            assert cover.gamma_inverse(i, a) == e


def test_circle_cover_is_admissible(circle_pair: Triple) -> None:
    """Test the cover of the circle pair with its two sheets."""
    source, target, cert = circle_pair
    cover = build_admissible_cover(source, target, cert)
    assert check_admissible(source, target, cover).ok
    assert {cover.sheet_count(i) for i in range(len(cover))} == {2}


def test_cycle3_cover_is_admissible(cycle3: Triple) -> None:
    """Test the three-sheet cover."""
    source, target, cert = cycle3
    cover = build_admissible_cover(source, target, cert)
    assert check_admissible(source, target, cover).ok
    assert {cover.sheet_count(i) for i in range(len(cover))} == {3}
