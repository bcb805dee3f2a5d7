"""Tests for the ``topcorr`` command line."""

import json
from pathlib import Path

import pandas as pd
import pytest

from topcorr.cli import main
from topcorr.services.fixtures import dkflip_certificate
from topcorr.services.serialization import certificate_to_json, write_json


@pytest.fixture
def corpus(tmp_path: Path) -> Path:
    """The fixture corpus written to a temporary directory."""
    assert main(["fixtures", str(tmp_path)]) == 0
    return tmp_path


def _report(capsys: pytest.CaptureFixture[str]) -> dict:
    return json.loads(capsys.readouterr().out)


def test_fixtures_lists_written_files(
    tmp_path: Path, capsys: pytest.CaptureFixture[str],
) -> None:
    """Test that the fixtures command reports every file it wrote."""
    assert main(["fixtures", str(tmp_path / "out")]) == 0
    report = _report(capsys)
    assert "D1.json" in report["files"]
    assert all((tmp_path / "out" / name).is_file()
               for name in report["files"])


def test_validate_discrete_graph(
    corpus: Path, capsys: pytest.CaptureFixture[str],
) -> None:
    """Test the validation report of D1."""
    capsys.readouterr()
    assert main(["validate", str(corpus / "D1.json")]) == 0
    report = _report(capsys)
    assert report["ok"]
    assert report["discrete"]
    assert report["edges"]["vertices"] == 3


def test_malformed_file_exits_2(
    tmp_path: Path, capsys: pytest.CaptureFixture[str],
) -> None:
    """Test that a schema violation names its pointer on stderr."""
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"base": {"vertices": ["a"]}}),
                    encoding="utf-8")
    assert main(["validate", str(path)]) == 2
    assert "/" in capsys.readouterr().err


def test_missing_file_exits_2(tmp_path: Path) -> None:
    """Test that an unreadable file is a schema error."""
    assert main(["validate", str(tmp_path / "absent.json")]) == 2


def test_discrete_non_conjugacy(
    corpus: Path, capsys: pytest.CaptureFixture[str],
) -> None:
    """Test that D1 against D1plus is answered, not failed."""
    capsys.readouterr()
    assert main(["conjugacy", str(corpus / "D1.json"),
                 str(corpus / "D1plus.json")]) == 0
    report = _report(capsys)
    assert report["verdict"] == "not_conjugate"
    assert report["reason"] == "edge counts differ"


def test_discrete_conjugacy_writes_certificate(
    corpus: Path, tmp_path: Path, capsys: pytest.CaptureFixture[str],
) -> None:
    """Test that a found certificate is written and verifies again."""
    out = tmp_path / "found.json"
    source, target = str(corpus / "D1.json"), str(corpus / "D1relabeled.json")
    assert main(["conjugacy", source, target, "--out", str(out)]) == 0
    assert out.is_file()
    capsys.readouterr()
    assert main(["conjugacy", source, target,
                 "--certificate", str(out)]) == 0
    assert _report(capsys)["verdict"] == "conjugate"


def test_pl_conjugacy_needs_certificate(corpus: Path) -> None:
    """Test that PL graphs without a certificate fail a precondition."""
    assert main(["conjugacy", str(corpus / "DKFLIP_E.json"),
                 str(corpus / "DKFLIP_F.json")]) == 3


def test_failing_certificate_still_reports(
    corpus: Path, tmp_path: Path, capsys: pytest.CaptureFixture[str],
) -> None:
    """Test that a failed verdict exits 3 and prints its report."""
    bad = tmp_path / "unswapped.json"
    write_json(certificate_to_json(dkflip_certificate(swapped=False)), bad)
    capsys.readouterr()
    assert main(["conjugacy", str(corpus / "DKFLIP_E.json"),
                 str(corpus / "DKFLIP_F.json"),
                 "--certificate", str(bad)]) == 3
    report = _report(capsys)
    assert report["verdict"] == "certificate_failed"
    assert any(not check["ok"] for check in report["checks"])


def test_cover_report(
    corpus: Path, capsys: pytest.CaptureFixture[str],
) -> None:
    """Test the cover conditions of the DKFLIP certificate."""
    capsys.readouterr()
    assert main(["cover", str(corpus / "DKFLIP_E.json"),
                 str(corpus / "DKFLIP_F.json"),
                 "--certificate", str(corpus / "DKFLIP_cert.json")]) == 0
    report = _report(capsys)
    assert all(report["conditions"].values())
    assert set(report["sheet_counts"]) == {2}


def test_equivalence_with_residual_csv(
    corpus: Path, tmp_path: Path, capsys: pytest.CaptureFixture[str],
) -> None:
    """Test the DKFLIP equivalence end to end, residual rows included."""
    csv = tmp_path / "residuals.csv"
    capsys.readouterr()
    assert main(["equivalence", str(corpus / "DKFLIP_E.json"),
                 str(corpus / "DKFLIP_F.json"),
                 "--certificate", str(corpus / "DKFLIP_cert.json"),
                 "--samples", "40", "--seed", "1", "--csv", str(csv)]) == 0
    report = _report(capsys)
    assert report["flips"] == 1
    assert [step["kind"] for step in report["steps"]] == ["flip", "pullback"]
    assert report["verification"]["ok"]
    frame = pd.read_csv(csv)
    assert len(frame) == 40
    assert frame["isometry"].max() <= 1e-9


def test_fock_norm(corpus: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """Test that t(e1) on D1 has norm one."""
    capsys.readouterr()
    assert main(["fock", str(corpus / "D1.json"), "--depth", "2",
                 "--element", "t(e1)"]) == 0
    report = _report(capsys)
    assert report["dimension"] == 10
    assert report["norm_lower_bound"] == pytest.approx(1.0)


def test_fock_bad_element_exits_2(corpus: Path) -> None:
    """Test that an unknown edge in the element is a schema error."""
    assert main(["fock", str(corpus / "D1.json"), "--depth", "1",
                 "--element", "t(e9)"]) == 2


def test_characters_over_a_vertex(
    corpus: Path, capsys: pytest.CaptureFixture[str],
) -> None:
    """Test that D1 has a one-dimensional character ball over ``a``."""
    capsys.readouterr()
    assert main(["characters", str(corpus / "D1.json"),
                 "--vertex", "a"]) == 0
    report = _report(capsys)
    assert report["n"] == 1
    assert report["loops"] == ["e1"]


def test_nestrep_over_a_pair(
    corpus: Path, capsys: pytest.CaptureFixture[str],
) -> None:
    """Test the nest representation over the pair (b, a) of D1."""
    capsys.readouterr()
    assert main(["nestrep", str(corpus / "D1.json"), "--pair", "b,a"]) == 0
    report = _report(capsys)
    assert report["n"] == 1
    assert report["fiber"] == ["e2"]


@pytest.mark.parametrize(("flag", "marker"), [
    ("--markdown", "# Local conjugacy"),
    ("--html", "<title>Local conjugacy</title>"),
])
def test_report_formats(
    corpus: Path, capsys: pytest.CaptureFixture[str], flag: str, marker: str,
) -> None:
    """Test that the Markdown and HTML reports carry the command title."""
    capsys.readouterr()
    assert main(["conjugacy", str(corpus / "D1.json"),
                 str(corpus / "D1plus.json"), flag]) == 0
    out = capsys.readouterr().out
    assert marker in out
    assert "not_conjugate" in out
