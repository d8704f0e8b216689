import json
import math
import os

import pytest

from markovext.bitfield import BitString
from markovext.cli import csv_to_report, main, report_to_csv
from markovext.extractors import deor_extract
from markovext.paramcalc import deor_quantum_corollary

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def _run(capsys, argv):
    rc = main(argv)
    out = capsys.readouterr().out
    return rc, out


# ---------------------------------------------------------------------------
# plan
# ---------------------------------------------------------------------------

def test_plan_plain_echoes_base_law(capsys):
    rc, out = _run(capsys, [
        "plan", "--model", "plain", "--family", "deor",
        "--n1", "8", "--n2", "8", "--m", "2", "--k1", "6", "--k2", "6"])
    assert rc == 0
    rep = json.loads(out)
    assert rep["version"] == "1"
    assert rep["assessment"]["error"] == pytest.approx(2 ** -1.5, rel=1e-12)
    assert rep["assessment"]["required_k"] == [6.0, 6.0]


def test_plan_quantum_matches_corollary(capsys):
    rc, out = _run(capsys, [
        "plan", "--model", "quantum-markov", "--family", "deor",
        "--n1", "64", "--n2", "64", "--m", "4", "--k1", "60", "--k2", "60"])
    assert rc == 0
    rep = json.loads(out)
    assert rep["assessment"]["error"] == pytest.approx(
        deor_quantum_corollary(64, 60, 60, 4), rel=1e-9
    )
    assert rep["assessment"]["required_k"] == pytest.approx([60.0, 60.0])


def test_plan_raz_out_of_domain_is_exit_3(capsys):
    rc = main([
        "plan", "--model", "quantum-markov", "--family", "raz",
        "--n1", "65536", "--n2", "65536", "--m", "10",
        "--k1", "50000", "--k2", "512", "--delta-prime", "0.7"])
    assert rc == 3


def test_plan_smooth_model(capsys):
    rc, out = _run(capsys, [
        "plan", "--model", "smooth-markov", "--family", "deor",
        "--n1", "64", "--n2", "64", "--m", "2", "--k1", "60", "--k2", "60",
        "--delta1", "0.001", "--delta2", "0.001", "--eps1", "0.002", "--eps2", "0.002"])
    assert rc == 0
    rep = json.loads(out)
    assert rep["assessment"]["model"] == "SmoothMarkov"
    assert 0 < rep["assessment"]["error"] <= 1


def test_plan_usage_error_is_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["plan", "--model", "no-such-model", "--family", "deor",
              "--n1", "8", "--n2", "8", "--m", "2", "--k1", "6", "--k2", "6"])
    assert exc.value.code == 2


# ---------------------------------------------------------------------------
# extract
# ---------------------------------------------------------------------------

def test_extract_matches_library(tmp_path):
    in1, in2, out = tmp_path / "a", tmp_path / "b", tmp_path / "y"
    in1.write_bytes(bytes([0x2A]))
    in2.write_bytes(bytes([0x0F]))
    rc = main(["extract", str(in1), str(in2), str(out),
               "--family", "deor", "--n1", "8", "--m", "4"])
    assert rc == 0
    expected = deor_extract(BitString(0x2A, 8), BitString(0x0F, 8), 4)
    assert out.read_bytes() == expected.to_bytes()


def test_extract_zero_factor_and_determinism(tmp_path):
    in1, in2, out1, out2 = (tmp_path / n for n in ("a", "b", "y1", "y2"))
    in1.write_bytes(bytes([0xC7]))
    in2.write_bytes(bytes([0x00]))
    for out in (out1, out2):
        rc = main(["extract", str(in1), str(in2), str(out),
                   "--family", "deor", "--n1", "8", "--m", "8"])
        assert rc == 0
    assert out1.read_bytes() == bytes([0x00])
    assert out1.read_bytes() == out2.read_bytes()


def test_extract_short_input_is_exit_3(tmp_path):
    in1, in2, out = tmp_path / "a", tmp_path / "b", tmp_path / "y"
    in1.write_bytes(b"")
    in2.write_bytes(bytes([1]))
    rc = main(["extract", str(in1), str(in2), str(out),
               "--family", "deor", "--n1", "8", "--m", "2"])
    assert rc == 3


def test_extract_descriptor_file(tmp_path):
    in1, in2, out = tmp_path / "a", tmp_path / "b", tmp_path / "y"
    in1.write_bytes(bytes([0x2A]))
    in2.write_bytes(bytes([0x0F]))
    desc = tmp_path / "d.json"
    desc.write_text(json.dumps({"family": "DEOR", "n1": 8, "n2": 8, "m": 4, "params": {}}))
    rc = main(["extract", str(in1), str(in2), str(out), "--descriptor", str(desc)])
    assert rc == 0
    assert out.read_bytes() == deor_extract(BitString(0x2A, 8), BitString(0x0F, 8), 4).to_bytes()


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("suite", ["classical", "distinguishing", "monotonicity"])
def test_verify_suites_pass_and_are_deterministic(capsys, suite):
    rc1, out1 = _run(capsys, ["verify", "--suite", suite, "--seed", "7", "--budget", "4"])
    rc2, out2 = _run(capsys, ["verify", "--suite", suite, "--seed", "7", "--budget", "4"])
    assert rc1 == rc2 == 0
    assert out1 == out2
    rep = json.loads(out1)
    assert all(r["holds"] for r in rep["records"])
    assert rep["timing"] is None


def test_verify_quantum_and_composition(capsys):
    for suite in ("quantum", "composition"):
        rc, out = _run(capsys, ["verify", "--suite", suite, "--seed", "1", "--budget", "3"])
        assert rc == 0
        rep = json.loads(out)
        for r in rep["records"]:
            assert r["holds"] and r["distance"] <= r["bound"] + 1e-9


def test_verify_bad_budget_is_exit_4(capsys):
    assert main(["verify", "--suite", "classical", "--budget", "0"]) == 4
    assert main(["verify", "--suite", "classical", "--budget", "100000"]) == 4


def test_verify_unknown_suite_is_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "no-such-suite"])
    assert exc.value.code == 2


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def test_report_roundtrip_json_csv_json(capsys, tmp_path):
    rc, out = _run(capsys, ["verify", "--suite", "distinguishing", "--seed", "3", "--budget", "3"])
    assert rc == 0
    path = tmp_path / "r.json"
    path.write_text(out)
    rc, csv_text = _run(capsys, ["report", str(path), "--format", "csv"])
    assert rc == 0
    csv_path = tmp_path / "r.csv"
    csv_path.write_text(csv_text)
    rc, json_text = _run(capsys, ["report", str(csv_path), "--format", "json"])
    assert rc == 0
    assert json.loads(json_text) == json.loads(out)


def test_report_empty_records_csv(tmp_path, capsys):
    report = {"version": "1", "request": {}, "assessment": None, "records": [], "timing": None}
    path = tmp_path / "r.json"
    path.write_text(json.dumps(report))
    rc, out = _run(capsys, ["report", str(path), "--format", "csv"])
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "key,value"
    assert not any(line.startswith("records.") for line in lines)
    assert csv_to_report(out) == report


def test_report_matches_golden_file(capsys):
    golden_json = os.path.join(DATA_DIR, "golden_report.json")
    golden_csv = os.path.join(DATA_DIR, "golden_report.csv")
    rc, out = _run(capsys, ["report", golden_json, "--format", "csv"])
    assert rc == 0
    with open(golden_csv) as fh:
        assert out == fh.read()


def test_csv_report_requires_header():
    from markovext.errors import DomainError

    with pytest.raises(DomainError):
        csv_to_report("nope\n")
