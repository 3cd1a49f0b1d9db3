"""The command-line interface driven in process."""
import io
import json

import pytest

from conftest import p1_fan, p2_fan, hirzebruch_fan
from toricexc.cli import main


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(stdin)))
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out


@pytest.fixture
def fan_file(tmp_path):
    def write(fan, name="fan.json"):
        path = tmp_path / name
        path.write_text(json.dumps(fan.to_json()))
        return str(path)
    return write


def test_threshold(capsys):
    code, out = run(capsys, "threshold", "--n", "16", "--a", "1", "--eps", "1/8")
    doc = json.loads(out.out)
    assert code == 0
    assert doc["outputs"] == {"threshold": 386}
    assert doc["checks"][0]["status"] == "pass"
    assert set(doc) >= {"command", "inputs", "outputs", "checks", "tool_version", "timing"}


def test_bad_epsilon_is_a_usage_error(capsys):
    code, out = run(capsys, "threshold", "--n", "2", "--a", "1", "--eps", "1/8")
    assert code == 2 and "usage" in out.err


def test_family_and_rank(capsys, tmp_path):
    path = tmp_path / "y.json"
    code, _ = run(capsys, "family", "--n", "2", "--k", "2", "--a", "1", "--out", str(path))
    assert code == 0
    code, out = run(capsys, "rank-k0", "--fan", str(path), "--brief")
    assert code == 0 and json.loads(out.out) == {"rank_k0": 36}
    code, out = run(capsys, "family", "validate", "--n", "2", "--k", "2", "--a", "1", "--brief")
    assert code == 0 and json.loads(out.out)["ok"] is True


def test_fan_from_stdin(capsys, monkeypatch):
    code, out = run(capsys, "rank-k0", "--brief", stdin=p2_fan().to_json(), monkeypatch=monkeypatch)
    assert code == 0 and json.loads(out.out) == {"rank_k0": 3}


def test_cohomology_and_vanishing(capsys, fan_file):
    path = fan_file(p1_fan())
    code, out = run(capsys, "cohomology", "--fan", path, "--bundle", "-2", "--brief")
    assert code == 0 and json.loads(out.out)["h"] == [0, 1]
    code, out = run(capsys, "vanishing", "--fan", path, "--bundle", "-2")
    assert code == 1 and json.loads(out.out)["outputs"]["vanishes"] is False
    code, out = run(capsys, "vanishing", "--fan", path, "--bundle", "-1")
    assert code == 0
    code, _ = run(capsys, "vanishing", "--fan", path, "--bundle", "3")
    assert code == 1
    code, out = run(capsys, "vanishing", "--fan", path, "--bundle", "3", "--higher-only")
    assert code == 0 and json.loads(out.out)["outputs"]["forbidden_sets"] == []


def test_fano_negative_exit_code(capsys, fan_file):
    path = fan_file(hirzebruch_fan(3))
    code, out = run(capsys, "fano", "--fan", path, "--nef")
    assert code == 1
    assert json.loads(out.out)["outputs"] == {"fano": False, "nef_fano": False}
    code, _ = run(capsys, "fano", "--fan", fan_file(hirzebruch_fan(2), "f2.json"), "--nef")
    assert code == 0


def test_not_picard_three_reports_error(capsys, fan_file):
    code, out = run(capsys, "decompose", "--fan", fan_file(p2_fan()))
    assert code == 1 and json.loads(out.out)["error"]["type"] == "NotPicardThree"


def test_search_and_verify_round_trip(capsys, fan_file, tmp_path):
    cert = tmp_path / "search.json"
    code, _ = run(capsys, "search", "--fan", fan_file(p2_fan()), "--window", "-3..3", "--out", str(cert))
    assert code == 0
    doc = json.loads(cert.read_text())
    assert doc["outputs"]["length"] == 3 and doc["outputs"]["flag"] == "exact"
    code, out = run(capsys, "verify", str(cert))
    assert code == 0 and json.loads(out.out)["outputs"] == {"verified": True}
    # a tampered collection is caught
    doc["outputs"]["collection"] = [[0], [3], [6]]
    cert.write_text(json.dumps(doc))
    code, out = run(capsys, "verify", str(cert))
    assert code == 1


def test_bound_and_sublemma(capsys):
    code, out = run(capsys, "bound", "--n", "16", "--k", "386", "--a", "1", "--brief")
    assert code == 0 and json.loads(out.out)["rk_k0"] == 118806
    code, out = run(capsys, "sublemma", "--t", "2", "--samples", "30", "--brief")
    assert code == 0 and json.loads(out.out)["holds"] is True


def test_usage_errors(capsys, fan_file):
    with pytest.raises(SystemExit) as exc:
        main(["family", "--n", "2"])
    assert exc.value.code == 2
    code, _ = run(capsys, "family", "--n", "1", "--k", "2", "--a", "1")
    assert code == 2
    code, _ = run(capsys, "rank-k0", "--fan", "/nonexistent/fan.json")
    assert code == 2
    code, _ = run(capsys, "search", "--fan", fan_file(p2_fan()), "--window", "0..1,0..1")
    assert code == 2
