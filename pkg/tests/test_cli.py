from __future__ import annotations

import json

import pytest

from appqsim.cli import emit_json, ingest_series, main
from appqsim.simcore import MeasurementSeries, SchemaError


def run_cli(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_ff_pipeline(tmp_path, capsys):
    base = ["--lx", "2", "--ly", "2", "--steps", "4", "--shots", "200", "--seed", "3"]
    assert main(["ff_dynamic", "simulate", *base, "--out", str(tmp_path)]) == 0
    assert main(["ff_dynamic", "oracle", *base, "--out", str(tmp_path)]) == 0
    code, out, err = run_cli(["ff_dynamic", "score", *base, "--series", str(tmp_path / "series.json"), "--oracle", str(tmp_path / "oracle.json")], capsys)
    assert code == 0 and err == ""
    report = json.loads(out)
    assert report["benchmark"] == "ff_dynamic"
    assert {"config_hash", "seed"} <= set(report["provenance"])
    assert "x" in report["score"] and "delta_x" in report["score"]


def test_generate_emits_circuits(tmp_path, capsys):
    code, out, _ = run_cli(["maxcut", "generate", "--n", "8", "--T", "1.0"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["benchmark"] == "maxcut" and doc["provenance"]["seed"] == 0


def test_reports_are_byte_identical(tmp_path, capsys):
    argv = ["kagome", "simulate", "--lx", "1", "--ly", "2", "--ms", "0,2", "--p", "0.01", "--shots", "100", "--trajectories", "2", "--seed", "9"]
    _, a, _ = run_cli(argv, capsys)
    _, b, _ = run_cli(argv, capsys)
    assert a == b
    _, c, _ = run_cli(argv[:-1] + ["10"], capsys)
    assert c != a


def test_nmr_invalid_dt_exit_code(capsys):
    code, out, err = run_cli(["nmr", "simulate", "--dt", "0.03"], capsys)
    assert code == 2 and out == ""
    assert json.loads(err)["error"] == "step_count_not_integer"


def test_missing_series_file(tmp_path, capsys):
    code, _, err = run_cli(["chem", "score", "--series", str(tmp_path / "nope.json")], capsys)
    assert code == 2 and json.loads(err)["error"] == "file_not_found"


def test_malformed_series_enumerates_problems(tmp_path, capsys):
    bad = write(tmp_path / "s.json", {"benchmark": "chem", "points": [{"t": 4.0, "mean": "x"}, {"n": 1.5, "mean": 0.1, "stderr": 0.1}]})
    code, _, err = run_cli(["chem", "score", "--series", bad], capsys)
    doc = json.loads(err)
    assert code == 2 and doc["error"] == "invalid_series" and len(doc["details"]) == 2


def test_stderr_required_unless_exact(tmp_path):
    p = write(tmp_path / "a.json", {"benchmark": "chem", "points": [{"t": 4.0, "mean": 0.3}]})
    with pytest.raises(SchemaError):
        ingest_series(p)
    p = write(tmp_path / "b.json", {"benchmark": "chem", "exact": True, "points": [{"t": 4.0, "mean": 0.3}]})
    series, gaps = ingest_series(p)
    assert series.points[0].stderr == 0.0 and gaps == 0


def test_minimal_series_round_trip_is_byte_stable(tmp_path):
    doc = {"benchmark": "kagome", "exact": False, "parameters": {"lx": 2}, "points": [{"n": 0, "mean": -18.0, "stderr": 0.1, "shots": 10}]}
    text = emit_json(doc)
    p = tmp_path / "s.json"
    p.write_text(text)
    series, _ = ingest_series(p)
    assert emit_json(series.to_json()) == text
    assert emit_json(MeasurementSeries.from_json(json.loads(text)).to_json()) == text


def test_nmr_gaps_zero_filled(tmp_path):
    pts = [{"n": n, "mean": 1.0, "stderr": 0.0} for n in range(0, 1001, 2)]
    p = write(tmp_path / "s.json", {"benchmark": "nmr", "parameters": {"dt": 0.05}, "points": pts})
    series, gaps = ingest_series(p, "nmr")
    assert len(series.points) == 1001 and gaps == 500
    assert series.points[1].mean == 0.0 and series.points[2].mean == 1.0


def test_benchmark_mismatch(tmp_path):
    p = write(tmp_path / "s.json", {"benchmark": "chem", "points": []})
    with pytest.raises(SchemaError, match="benchmark_mismatch"):
        ingest_series(p, "nmr")


def test_text_and_csv_formats(tmp_path, capsys):
    argv = ["chem", "simulate", "--circuits", "20", "--shots", "20", "--out", str(tmp_path)]
    assert main(argv) == 0
    series = str(tmp_path / "series.json")
    code, text, _ = run_cli(["chem", "report", "--circuits", "20", "--shots", "20", "--series", series], capsys)
    assert code == 0 and "chem" in text
    code, csv, _ = run_cli(["chem", "report", "--circuits", "20", "--shots", "20", "--series", series, "--format", "csv"], capsys)
    assert code == 0 and "," in csv.splitlines()[0]


def test_maxcut_invalid_connectivity(capsys):
    code, _, err = run_cli(["maxcut", "simulate", "--connectivity", "ring"], capsys)
    assert code == 2 and "error" in json.loads(err)


@pytest.mark.slow
def test_nmr_simulate_then_score(tmp_path, capsys):
    flags = ["--dt", "0.05", "--p", "0.001", "--trajectories", "2", "--seed", "1"]
    assert main(["nmr", "simulate", *flags, "--out", str(tmp_path)]) == 0
    code, out, _ = run_cli(["nmr", "score", *flags, "--series", str(tmp_path / "series.json")], capsys)
    report = json.loads(out)
    assert code == 0 and report["diagnostics"]["zero_filled"] == 0
    assert report["score"]["S_NMR"] >= 0
