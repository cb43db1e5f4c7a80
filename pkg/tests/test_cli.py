import json
import re
from pathlib import Path

import pytest
from click.testing import CliRunner

from spanwork.cli import main

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"
OR2 = str(DATA / "or2_program.json")


def run(args, out):
    res = CliRunner().invoke(main, [*args, "--out", str(out)])
    return res


def report(out, command, label):
    return json.loads((out / command / label / "report.json").read_text())


def test_eval_writes_report(tmp_path):
    res = run(["eval", "--program", OR2], tmp_path)
    assert res.exit_code == 0, res.output
    body = report(tmp_path, "eval", "or2_program")
    assert [r["f"] for r in body["rows"]] == [0, 1, 1, 1]
    assert (tmp_path / "eval" / "or2_program" / "table.csv").exists()


def test_wsize_with_costs_and_inline_formula(tmp_path):
    assert run(["wsize", "--program", OR2, "--costs", "4,1"], tmp_path).exit_code == 0
    assert report(tmp_path, "wsize", "or2_program")["wsize"] == pytest.approx(5.0)
    res = run(["wsize", "--formula", '["or", 1, 2]'], tmp_path)
    assert res.exit_code == 0, res.output
    assert report(tmp_path, "wsize", "formula")["wsize"] == pytest.approx(2 ** 0.5)


@pytest.mark.parametrize("cmd,key,value", [("adv", "adv", 2.0), ("advpm", "advpm", 2.0), ("synth", "wsize", 2.0)])
def test_sdp_commands(tmp_path, cmd, key, value):
    res = run([cmd, "--function", "maj3"], tmp_path)
    assert res.exit_code == 0, res.output
    assert report(tmp_path, cmd, "maj3")[key] == pytest.approx(value, abs=1e-4)


def test_synth_writes_program_and_scs_fallback_choice(tmp_path):
    res = run(["synth", "--function", str(DATA / "and2.json"), "--method", "scs", "--tolerance", "1e-8"], tmp_path)
    assert res.exit_code == 0, res.output
    assert report(tmp_path, "synth", "and2")["computes_f"] is True
    res = run(["eval", "--program", str(tmp_path / "synth" / "and2" / "program.json")], tmp_path)
    assert [r["f"] for r in report(tmp_path, "eval", "program")["rows"]] == [0, 0, 0, 1]


def test_canon_and_dual(tmp_path):
    assert run(["canon", "--program", OR2], tmp_path).exit_code == 0
    rows = report(tmp_path, "canon", "or2_program")["rows"]
    assert all(r["f_before"] == r["f_after"] for r in rows)
    assert run(["dual", "--program", OR2], tmp_path).exit_code == 0
    rows = report(tmp_path, "dual", "or2_program")["rows"]
    assert all(r["f_before"] == 1 - r["f_after"] for r in rows)


def test_compose_programs_and_formula(tmp_path):
    res = run(["compose", "--program", OR2, "--program", str(DATA / "bit_program.json"),
               "--method", "tensor"], tmp_path)
    assert res.exit_code == 0, res.output
    res = run(["compose", "--formula", str(DATA / "and_or_formula.json")], tmp_path)
    assert res.exit_code == 0, res.output
    assert report(tmp_path, "compose", "formula-direct_sum")["wsize"] == pytest.approx(2.0, abs=1e-6)


def test_graph_spectra_simulate(tmp_path):
    assert run(["graph", "--program", OR2], tmp_path).exit_code == 0
    assert (tmp_path / "graph" / "or2_program" / "graph.txt").read_text().startswith("{")
    for mode, lam in [("raw", "0.1"), ("blackbox", "0.125"), ("witnessed", "0.05")]:
        res = run(["spectra", "--program", OR2, "--mode", mode, "--lambda", lam], tmp_path)
        assert res.exit_code == 0, res.output
    rows = report(tmp_path, "spectra", "or2_program-blackbox")["rows"]
    assert rows[0]["passed"] is True
    res = run(["simulate", "--formula", str(DATA / "and_or_formula.json")], tmp_path)
    assert res.exit_code == 0, res.output
    res = run(["simulate", "--formula", '["and", 1, 2]', "--method", "continuous", "--samples", "200"], tmp_path)
    assert res.exit_code == 0, res.output


def test_pipeline_ok(tmp_path):
    res = run(["pipeline", "--function", "and2"], tmp_path)
    assert res.exit_code == 0, res.output
    body = report(tmp_path, "pipeline", "and2-seed0")
    assert body["all_correct"] and body["adv_pm"] == pytest.approx(2 ** 0.5, abs=1e-4)


def test_reports_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for root in (a, b):
        res = run(["simulate", "--program", OR2, "--mode", "circuit", "--seed", "7"], root)
        assert res.exit_code == 0, res.output
    rel = Path("simulate") / "or2_program-discrete-circuit-seed7" / "report.json"
    assert (a / rel).read_bytes() == (b / rel).read_bytes()


def test_exit_code_schema(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "span_program", "n": 1, "target": [1], "inputs": {"3,1": [[1]]}}')
    res = run(["eval", "--program", str(bad)], tmp_path)
    assert res.exit_code == 2
    assert "SchemaError" in res.output
    assert run(["eval"], tmp_path).exit_code == 2
    assert run(["adv", "--function", "nonsense"], tmp_path).exit_code == 2
    assert run(["simulate", "--program", OR2, "--mode", "quantum"], tmp_path).exit_code == 2


def test_exit_code_numerical(tmp_path):
    always = tmp_path / "always.json"
    always.write_text('{"kind": "span_program", "n": 1, "target": [1], "free": [[1]]}')
    res = run(["canon", "--program", str(always)], tmp_path)
    assert res.exit_code == 3
    assert "EmptyFalseSet" in res.output


def test_exit_code_verification(tmp_path):
    res = run(["verify", "--only", "7"], tmp_path)
    assert res.exit_code == 4
    assert re.search(r"\[FAIL\] criterion +7:", res.output)
    res = run(["verify", "--suite", "paper", "--only", "11"], tmp_path)
    assert res.exit_code == 0
    assert re.search(r"\[PASS\] criterion +11:", res.output)


def test_documented_invocations(tmp_path):
    res = run(["advpm", "--function", str(DATA / "maj3.json")], tmp_path)
    assert res.exit_code == 0, res.output
    body = report(tmp_path, "advpm", "maj3")
    assert body["advpm"] == pytest.approx(2.0, abs=1e-4)
    assert body["config"]["tolerance"] > 0 and "range_tol" in body["tolerances"]
    res = run(["pipeline", "--function", str(DATA / "and2.json"), "--seed", "7"], tmp_path)
    assert res.exit_code == 0, res.output
    body = report(tmp_path, "pipeline", "and2-seed7")
    assert body["config"]["walk"]["seed"] == 7
    assert {"x", "decision", "accept_probability", "queries"} <= set(body["rows"][0])


def test_simulate_rows_carry_decisions(tmp_path):
    assert run(["simulate", "--program", OR2], tmp_path).exit_code == 0
    rows = report(tmp_path, "simulate", "or2_program-discrete-spectral-seed0")["rows"]
    assert [r["decision"] for r in rows] == [r["f"] for r in rows]
