from __future__ import annotations

import csv
import io
import json

import jsonschema
import pytest

from wdn_lipschitz import load_report_schema
from wdn_lipschitz.cli import main

from conftest import FIXTURE_DIR


def run(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_analyze_three_node_analytical(capsys):
    code, out = run(capsys, "analyze", str(FIXTURE_DIR / "three_node.inp"),
                    "--bounds", str(FIXTURE_DIR / "three_node_bounds.csv"),
                    "--methods", "analytical", "--format", "json")
    assert code == 0
    report = json.loads(out)
    est = report["estimates"]["analytical"]
    assert abs(est["value"] - 0.5023) <= 5e-4
    assert abs(est["per_class"]["pipes"] - 0.004) <= 5e-4
    assert report["network"]["counts"] == {
        "junctions": 1, "reservoirs": 1, "tanks": 1,
        "pipes": 1, "pumps": 1, "valves": 0}


def test_analyze_interval_certifies_analytical(capsys):
    code, out = run(capsys, "analyze", str(FIXTURE_DIR / "three_node.inp"),
                    "--bounds", str(FIXTURE_DIR / "three_node_bounds.csv"),
                    "--methods", "analytical,interval", "--gap", "1e-6",
                    "--format", "json")
    assert code == 0
    report = json.loads(out)
    analytical = report["estimates"]["analytical"]["value"]
    upper = report["estimates"]["interval_max"]["value"]
    assert 0.0 <= upper - analytical <= 1e-6


def test_analyze_report_validates_against_schema(capsys):
    code, out = run(capsys, "analyze", str(FIXTURE_DIR / "three_node.inp"),
                    "--bounds", str(FIXTURE_DIR / "three_node_bounds.csv"),
                    "--methods", "analytical,osl,interval,point",
                    "--samples", "200", "--format", "json")
    assert code == 0
    jsonschema.validate(json.loads(out), load_report_schema())


def test_analyze_table_format(capsys):
    code, out = run(capsys, "analyze", str(FIXTURE_DIR / "three_node.inp"),
                    "--bounds", str(FIXTURE_DIR / "three_node_bounds.csv"),
                    "--methods", "analytical")
    assert code == 0
    assert "three_node" in out
    assert "analytical" in out
    assert "per class" in out


def test_analyze_csv_format(capsys):
    code, out = run(capsys, "analyze", str(FIXTURE_DIR / "three_node.inp"),
                    "--bounds", str(FIXTURE_DIR / "three_node_bounds.csv"),
                    "--methods", "analytical", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    assert float(rows[0]["analytical"]) == pytest.approx(0.5023, abs=5e-4)


def test_missing_inp_exits_2(capsys):
    code, _ = run(capsys, "analyze", "missing.inp")
    assert code == 2


def test_unparseable_inp_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.inp"
    bad.write_text("[RESERVOIRS]\nR1 100\n")   # no [JUNCTIONS]
    code, _ = run(capsys, "analyze", str(bad), "--default-bounds")
    assert code == 2


def test_missing_bounds_exits_3(capsys, tmp_path):
    code, _ = run(capsys, "analyze", str(FIXTURE_DIR / "three_node.inp"))
    assert code == 3
    code, _ = run(capsys, "analyze", str(FIXTURE_DIR / "three_node.inp"),
                  "--bounds", str(tmp_path / "nope.csv"))
    assert code == 3


def test_invalid_bounds_exits_3(capsys, tmp_path):
    bad = tmp_path / "inverted.csv"
    bad.write_text("link_id,q_min,q_max\nP1,5,-5\nPU1,1,900\n")
    code, _ = run(capsys, "analyze", str(FIXTURE_DIR / "three_node.inp"),
                  "--bounds", str(bad))
    assert code == 3


def test_assumption_violation_exits_4(capsys, tmp_path):
    bad = tmp_path / "pump_zero.csv"
    bad.write_text("link_id,q_min,q_max\nP1,0,900\nPU1,0,900\n")
    code, _ = run(capsys, "analyze", str(FIXTURE_DIR / "three_node.inp"),
                  "--bounds", str(bad))
    assert code == 4


def test_parameter_out_of_range_exits_4(tmp_path, capsys):
    bad = tmp_path / "bad_speed.inp"
    text = (FIXTURE_DIR / "three_node.inp").read_text()
    bad.write_text(text.replace("HEAD PC1", "HEAD PC1 SPEED 1.7"))
    code, _ = run(capsys, "analyze", str(bad), "--default-bounds")
    assert code == 4


def test_default_bounds_without_pumps_exits_3(capsys):
    code, _ = run(capsys, "analyze", str(FIXTURE_DIR / "net2.inp"),
                  "--default-bounds")
    assert code == 3


def test_default_bounds_accepted(capsys):
    code, out = run(capsys, "analyze", str(FIXTURE_DIR / "three_node.inp"),
                    "--default-bounds", "--methods", "analytical",
                    "--format", "json")
    assert code == 0
    assert json.loads(out)["config"]["bounds"] == "default"


def test_analyze_out_file(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code, _ = run(capsys, "analyze", str(FIXTURE_DIR / "three_node.inp"),
                  "--bounds", str(FIXTURE_DIR / "three_node_bounds.csv"),
                  "--methods", "analytical", "--out", str(out_path))
    assert code == 0
    jsonschema.validate(json.loads(out_path.read_text()), load_report_schema())


def test_benchmark_single_network_matches_analyze(capsys):
    code, out = run(capsys, "benchmark", str(FIXTURE_DIR),
                    "--networks", "three_node", "--samples", "500",
                    "--repeats", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    row = rows[0]
    assert row["network"] == "three_node"
    assert row["status"] == "ok"
    assert (row["junctions"], row["valves"]) == ("1", "0")
    analytical = float(row["analytical"])
    assert analytical == pytest.approx(0.5023, abs=5e-4)
    assert float(row["point_max"]) <= analytical
    assert analytical <= float(row["interval_max"]) <= float(row["interval_sqrt"])
    assert float(row["point_sqrt"]) <= float(row["interval_sqrt"])


def test_benchmark_full_run_holds_orderings(capsys):
    code, out = run(capsys, "benchmark", str(FIXTURE_DIR),
                    "--samples", "300", "--repeats", "1", "--gap", "5e-2")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["network"] for r in rows] == [
        "three_node", "eight_node", "anytown", "net2", "net3", "obcl"]
    for row in rows:
        assert row["status"] == "ok"
        analytical = float(row["analytical"])
        assert float(row["point_max"]) <= analytical
        assert analytical <= float(row["interval_max"]) <= float(row["interval_sqrt"])
        assert float(row["point_sqrt"]) <= float(row["interval_sqrt"])


def test_benchmark_is_byte_deterministic(capsys):
    args = ("benchmark", str(FIXTURE_DIR), "--networks", "three_node,net2",
            "--samples", "200", "--repeats", "1", "--sampler", "random",
            "--seed", "7")
    code1, out1 = run(capsys, *args)
    code2, out2 = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2


def test_benchmark_timing_csv(tmp_path, capsys):
    timing = tmp_path / "timing.csv"
    code, _ = run(capsys, "benchmark", str(FIXTURE_DIR),
                  "--networks", "three_node", "--samples", "100",
                  "--repeats", "3", "--timing-out", str(timing))
    assert code == 0
    rows = list(csv.DictReader(timing.open()))
    methods = {r["method"] for r in rows}
    assert {"analytical", "point_max", "point_sqrt",
            "interval_max", "interval_sqrt"} <= methods
    assert all(r["runs"] == "3" for r in rows)
    assert all(float(r["median_s"]) >= 0.0 for r in rows)


def test_benchmark_unknown_network_exits_2(capsys):
    code, _ = run(capsys, "benchmark", str(FIXTURE_DIR),
                  "--networks", "atlantis")
    assert code == 2


def test_convergence_trace(capsys):
    code, out = run(capsys, "convergence", str(FIXTURE_DIR / "three_node.inp"),
                    "--bounds", str(FIXTURE_DIR / "three_node_bounds.csv"),
                    "--samplers", "sobol,random", "--n-grid", "10,100,1000",
                    "--mode", "max")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["sampler"] for r in rows] == ["sobol"] * 3 + ["random"] * 3
    assert [int(r["n"]) for r in rows] == [10, 100, 1000, 10, 100, 1000]
    sobol_vals = [float(r["estimate"]) for r in rows if r["sampler"] == "sobol"]
    assert sobol_vals == sorted(sobol_vals)
    assert all(v <= 0.5025324065273796 for v in sobol_vals)
    assert all(r["mode"] == "max" for r in rows)


def test_convergence_single_n(capsys):
    code, out = run(capsys, "convergence", str(FIXTURE_DIR / "three_node.inp"),
                    "--bounds", str(FIXTURE_DIR / "three_node_bounds.csv"),
                    "--samplers", "sobol", "--n-grid", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1 and rows[0]["n"] == "1"


def test_convergence_unknown_sampler_exits_2(capsys):
    code, _ = run(capsys, "convergence", str(FIXTURE_DIR / "three_node.inp"),
                  "--bounds", str(FIXTURE_DIR / "three_node_bounds.csv"),
                  "--samplers", "latin")
    assert code == 2
