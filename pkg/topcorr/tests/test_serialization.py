"""Tests for topcorr.services.serialization, validation and settings."""

import json
from fractions import Fraction
from pathlib import Path

import pytest

from topcorr.core.cover.admissible import (
    build_admissible_cover,
    check_admissible,
)
from topcorr.core.cover.certificate import (
    ConjugacyCertificate,
    verify_certificate,
)
from topcorr.core.errors import SchemaError
from topcorr.core.graph import TopGraph
from topcorr.core.settings import get_settings
from topcorr.core.space.complex import Complex1, Point
from topcorr.services.fixtures import GRAPH_FIXTURES, write_fixtures
from topcorr.services.serialization import (
    certificate_from_json,
    certificate_to_json,
    cover_to_json,
    dumps,
    graph_from_json,
    graph_to_json,
    load_cover,
    load_graph,
    load_json,
    parse_point,
    parse_rational,
    write_json,
)
from topcorr.services.validation import json_pointer, schema_issues

Triple = tuple[TopGraph, TopGraph, ConjugacyCertificate]


def test_graph_round_trip_is_canonical(d1: TopGraph) -> None:
    """Test that writing a read graph gives the same canonical text."""
    text = dumps(graph_to_json(d1))
    again = graph_from_json(json.loads(text))
    assert dumps(graph_to_json(again)) == text
    assert again.name == d1.name
    assert again.validate().ok


def test_pl_graph_survives_a_round_trip(dkflip: Triple) -> None:
    """Test that a PL graph reads back with the same loops and fibers."""
    source, _, _ = dkflip
    again = graph_from_json(json.loads(dumps(graph_to_json(source))))
    assert dumps(graph_to_json(again)) == dumps(graph_to_json(source))
    assert again.validate().ok


def test_unknown_segment_endpoint(d1: TopGraph) -> None:
    """Test the pointer of a segment naming an unknown vertex."""
    doc = graph_to_json(d1)
    doc["base"]["segments"] = [["v1", "nowhere"]]
    with pytest.raises(SchemaError) as info:
        graph_from_json(doc)
    assert info.value.path == "/base/segments/0"
    assert str(info.value).startswith("/base/segments/0: ")


def test_missing_required_key(d1: TopGraph) -> None:
    """Test that the schema rejects a graph without a source map."""
    doc = graph_to_json(d1)
    del doc["s"]
    issues = schema_issues(doc, "graph")
    assert issues
    assert issues[0][0] == "/"
    with pytest.raises(SchemaError):
        graph_from_json(doc)


def test_schema_issue_pointer(d1: TopGraph) -> None:
    """Test that nested violations carry their JSON pointer."""
    doc = graph_to_json(d1)
    doc["edges"]["vertices"] = []
    assert ("/edges/vertices" in {path for path, _ in
                                  schema_issues(doc, "graph")})


def test_json_pointer_escapes() -> None:
    """Test escaping of ``~`` and ``/`` in pointer segments."""
    assert json_pointer([]) == "/"
    assert json_pointer(["a/b", "c~d", 0]) == "/a~1b/c~0d/0"


def test_load_json_rejects_garbage(tmp_path: Path) -> None:
    """Test that a broken file is a schema error, not a crash."""
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(SchemaError, match="not valid JSON"):
        load_json(path)


@pytest.mark.parametrize(
    ("text", "expected"),
    [("1/3", Fraction(1, 3)), ("0.25", Fraction(1, 4)), (2, Fraction(2))],
)
def test_parse_rational(text: str | int, expected: Fraction) -> None:
    """Test the accepted spellings of a rational."""
    assert parse_rational(text, "/t") == expected


def test_parse_rational_rejects_words() -> None:
    """Test the pointer of a malformed rational."""
    with pytest.raises(SchemaError) as info:
        parse_rational("third", "/pieces/0/t")
    assert info.value.path == "/pieces/0/t"


def test_parse_point(unit: Complex1) -> None:
    """Test vertex ids and ``segment:t`` on the command line."""
    assert parse_point("1/3", unit) == Point.at("1/3")
    assert parse_point("0:1/2", unit) == unit.point(0, Fraction(1, 2))
    with pytest.raises(SchemaError):
        parse_point("elsewhere", unit)
    with pytest.raises(SchemaError):
        parse_point("9:1/2", unit)


def test_certificate_round_trip_verifies(dkflip: Triple) -> None:
    """Test that a written certificate still verifies after reading it."""
    source, target, cert = dkflip
    doc = json.loads(dumps(certificate_to_json(cert)))
    again = certificate_from_json(doc, source, target)
    assert len(again.pieces) == len(cert.pieces)
    assert verify_certificate(source, target, again).ok


def test_certificate_inverses_are_optional(dkflip: Triple) -> None:
    """Test that missing inverses are computed on reading."""
    source, target, cert = dkflip
    doc = json.loads(dumps(certificate_to_json(cert)))
    del doc["tau_inverse"]
    for piece in doc["pieces"]:
        del piece["gamma_inverse"]
    assert verify_certificate(source, target,
                              certificate_from_json(doc, source,
                                                    target)).ok


def test_written_fixtures_load(tmp_path: Path) -> None:
    """Test that every fixture graph file reads back as a valid graph."""
    written = write_fixtures(tmp_path)
    graphs = [p for p in written if p.stem in GRAPH_FIXTURES]
    assert len(graphs) == len(GRAPH_FIXTURES)
    for path in graphs:
        assert load_graph(path).validate().ok


def test_settings_from_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test that the sampling resolution and seed come from the env."""
    monkeypatch.setenv("TOPCORR_SAMPLES", "16")
    monkeypatch.setenv("TOPCORR_SEED", "3")
    get_settings.cache_clear()
    try:
        settings = get_settings()
        assert settings.samples_per_segment == 16
        assert settings.seed == 3
    finally:
        get_settings.cache_clear()


def test_settings_reject_bad_values(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test the pointer of a malformed environment variable."""
    monkeypatch.setenv("TOPCORR_SAMPLES", "many")
    get_settings.cache_clear()
    try:
        with pytest.raises(SchemaError) as info:
            get_settings()
        assert info.value.path == "/env/TOPCORR_SAMPLES"
    finally:
        get_settings.cache_clear()


def test_cover_file_reads_back_admissible(
    dkflip: Triple, tmp_path: Path,
) -> None:
    """Test that a saved cover reloads with the same permutation data."""
    source, target, cert = dkflip
    cover = build_admissible_cover(source, target, cert)
    path = tmp_path / "cover.json"
    write_json(cover_to_json(cover), path)
    again = load_cover(path, source, target)
    assert len(again) == len(cover)
    assert again.source_permutations() == cover.source_permutations()
    assert again.target_permutations() == cover.target_permutations()
    assert check_admissible(source, target, again).ok
