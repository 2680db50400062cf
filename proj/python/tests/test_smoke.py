import shutil
from pathlib import Path

import pytest

import vulncure

FIXTURE = Path(__file__).resolve().parents[2] / "fixtures" / "workspace"


def test_thresholds():
    assert vulncure.score_to_label(6.9, "v2") == "MEDIUM"
    assert vulncure.score_to_label(7.0, "v2") == "HIGH"
    assert vulncure.score_to_label(9.0, "v3") == "CRITICAL"
    assert vulncure.score_to_label(0.0, "v3") == "NONE"
    with pytest.raises(vulncure.RangeError):
        vulncure.score_to_label(10.5, "v3")
    with pytest.raises(vulncure.VulncureError):
        vulncure.score_to_label(5.0, "v4")


def test_string_measures():
    assert vulncure.levenshtein("microsoft", "microsft") == 1
    assert vulncure.levenshtein("", "abc") == 3
    assert vulncure.longest_common_substring("bea", "bea_systems") == 3


def test_cwe_helpers():
    text = "CWE-835: Loop with Unreachable Exit Condition, see also cwe-20 and CWE-835"
    assert vulncure.extract_cwe_ids(text) == ["CWE-835", "CWE-20"]
    assert vulncure.preprocess_description("This capability can be accessed") == "capability access"


def test_disclosure_estimate():
    est = vulncure.estimate_disclosure("2011-03-14", [("http://www.securityfocus.com/bid/46249", "2011-02-07")])
    assert est["edd"] == "2011-02-07"
    assert est["lag_days"] == 35
    late = vulncure.estimate_disclosure("2011-03-14", [("http://example.com/a", "2011-04-01")])
    assert late["lag_days"] == 0 and late["source_url"] is None


def test_sha256():
    assert vulncure.sha256_hex("abc").startswith("ba7816bf")


def test_workspace_stages(tmp_path, monkeypatch):
    ws_dir = tmp_path / "ws"
    shutil.copytree(FIXTURE, ws_dir, ignore=shutil.ignore_patterns("out"))
    monkeypatch.setenv("VULNCURE_SEVERITY_EPOCHS", "3")
    ws = vulncure.Workspace(ws_dir / "vulncure.conf", seed=1)
    with pytest.raises(vulncure.MissingPrerequisite):
        ws.estimate_dates()
    result = ws.ingest()
    assert result["stage"] == "ingest"
    assert result["counts"]["records"] == "430"
    stages = [r["stage"] for r in ws.pipeline()]
    assert stages[0] == "ingest" and stages[-1] == "report-corrected"
    assert (Path(ws.output_dir) / "reports" / "corrected" / "lag_cdf.csv").exists()
