import io
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import jsonschema
import pytest

from gridsat.cli import main
from gridsat.cnf import parse_dimacs

REPORT_SCHEMA = {
    "type": "object",
    "required": ["command", "problem", "graph", "options", "solver", "seed", "timeout", "mode",
                 "param", "status", "optimum", "bounds", "iterations", "seconds", "solution"],
    "properties": {
        "command": {"enum": ["pathwidth", "bandwidth", "st-orient", "bar-vis", "bar-k-vis", "boxicity"]},
        "graph": {"type": "object", "required": ["name", "n", "m"],
                  "properties": {"n": {"type": "integer"}, "m": {"type": "integer"}}},
        "options": {"type": "object"},
        "mode": {"enum": ["sweep", "decision"]},
        "param": {"type": ["integer", "null"]},
        "status": {"enum": ["OPTIMAL", "TIMEOUT", "INFEASIBLE_IN_RANGE", "SAT", "UNSAT"]},
        "optimum": {"type": ["integer", "null"]},
        "bounds": {"oneOf": [{"type": "null"},
                             {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}]},
        "iterations": {"type": "array", "items": {
            "type": "object",
            "required": ["param", "num_vars", "num_clauses", "status", "seconds"]}},
        "seconds": {"type": "number"},
        "solution": {"type": ["object", "null"]},
    },
}

K4 = "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n"


@pytest.fixture
def files(tmp_path):
    (tmp_path / "k4.txt").write_text(K4)
    (tmp_path / "p2.txt").write_text("0 1\n")
    (tmp_path / "c4.txt").write_text("0 1\n1 2\n2 3\n3 0\n")
    (tmp_path / "unsat.cnf").write_text("p cnf 1 2\n1 0\n-1 0\n")
    (tmp_path / "sat.cnf").write_text("p cnf 2 1\n1 -2 0\n")
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def report(capsys, *argv):
    code, out = run(capsys, *argv)
    data = json.loads(out)
    jsonschema.validate(data, REPORT_SCHEMA)
    return code, data


def test_pathwidth_k4(capsys, files):
    code, data = report(capsys, "pathwidth", files / "k4.txt")
    assert code == 0 and data["optimum"] == 3 and data["status"] == "OPTIMAL"
    assert [it["status"] for it in data["iterations"]] == ["UNSAT", "UNSAT", "SAT"]


def test_bar_vis_decision_with_svg(capsys, files):
    svg = files / "p2.svg"
    code, data = report(capsys, "bar-vis", files / "p2.txt", "--grid", "2x1", "--param", "--svg", svg)
    assert code == 0 and data["status"] == "SAT" and data["param"] == 1
    root = ET.parse(svg).getroot()
    rects = [el for el in root.iter() if el.tag.endswith("rect")]
    assert sorted(r.get("class") for r in rects) == ["edge", "vertex", "vertex"]
    assert root.get("width") == "20" and root.get("height") == "40"


def test_boxicity_svg_one_box_per_vertex(capsys, files):
    svg = files / "c4.svg"
    code, data = report(capsys, "boxicity", files / "c4.txt", "--svg", svg, "--grid-lines")
    assert code == 0 and data["status"] == "OPTIMAL"
    root = ET.parse(svg).getroot()
    boxes = [el for el in root.iter() if el.tag.endswith("rect") and el.get("class") == "box"]
    assert len(boxes) == 4
    assert any(el.tag.endswith("line") for el in root.iter())


def test_decision_unsat_is_exit_zero(capsys, files):
    code, data = report(capsys, "bandwidth", files / "k4.txt", "--param", "2")
    assert code == 0 and data["status"] == "UNSAT" and data["solution"] is None


def test_st_report(capsys, files):
    code, data = report(capsys, "st-orient", files / "k4.txt", "--s", "0", "--t", "3")
    assert code == 0 and data["levels"] == 4 and data["longest_path"] == 3
    assert data["added_st_edge"] is False


def test_st_missing_edge_is_added(capsys, tmp_path):
    (tmp_path / "p3.txt").write_text("0 1\n1 2\n")
    code, data = report(capsys, "st-orient", tmp_path / "p3.txt")
    assert code == 0 and data["added_st_edge"] is True and data["graph"]["m"] == 3
    assert data["levels"] == 3


def test_timeout_exit_code(capsys, files):
    code, data = report(capsys, "pathwidth", files / "k4.txt", "--timeout", "0")
    assert code == 2 and data["status"] == "TIMEOUT"


def test_bounds_override_and_bad_range(capsys, files):
    code, data = report(capsys, "pathwidth", files / "k4.txt", "--min", "3", "--max", "3")
    assert data["bounds"] == [3, 3] and len(data["iterations"]) == 1
    code, _ = run(capsys, "pathwidth", files / "k4.txt", "--min", "3", "--max", "2")
    assert code == 1


def test_emit_cnf(capsys, files):
    out = files / "f.cnf"
    code, data = report(capsys, "bandwidth", files / "k4.txt", "--param", "3", "--emit-cnf", out)
    formula = parse_dimacs(out.read_text())
    assert formula.num_clauses == data["iterations"][0]["num_clauses"]


def test_stdin_graph(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO(K4))
    code, data = report(capsys, "bandwidth", "-")
    assert code == 0 and data["optimum"] == 3


def test_sequential_cardinality_flag(capsys, files):
    code, data = report(capsys, "pathwidth", files / "k4.txt", "--cardinality", "sequential")
    assert data["optimum"] == 3


def test_bar_k_vis_and_no_sten(capsys, files):
    code, data = report(capsys, "bar-k-vis", files / "c4.txt", "--k", "1")
    assert code == 0 and data["options"]["k"] == 1 and data["status"] == "OPTIMAL"
    code, data = report(capsys, "bar-vis", files / "c4.txt", "--no-sten")
    assert code == 0 and data["options"]["endpoints"] is False


def test_solve_cnf(capsys, files):
    code, out = run(capsys, "solve-cnf", files / "unsat.cnf")
    assert code == 0 and out.strip() == "UNSAT"
    code, out = run(capsys, "solve-cnf", files / "sat.cnf")
    lines = out.split("\n")
    assert code == 0 and lines[0] == "SAT" and lines[1].startswith("v ") and lines[1].endswith(" 0")
    code, out = run(capsys, "solve-cnf", files / "sat.cnf", "--json")
    assert json.loads(out)["status"] == "SAT"


@pytest.mark.parametrize("argv", [
    ["pathwidth", "missing-file.txt"],
    ["bar-k-vis", "GRAPH", "--k", "0"],
    ["st-orient", "GRAPH", "--s", "1", "--t", "1"],
    ["solve-cnf", "GARBAGE"],
])
def test_errors_exit_one(capsys, files, argv):
    (files / "garbage.cnf").write_text("not dimacs\n")
    subst = {"GRAPH": files / "k4.txt", "GARBAGE": files / "garbage.cnf"}
    assert main([str(subst.get(a, a)) for a in argv]) == 1
    assert "error" in capsys.readouterr().err


def test_usage_error_exit_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["pathwidth", "--bogus-flag", "x"])
    assert exc.value.code == 1


def test_bench(capsys, files, tmp_path):
    out = tmp_path / "rows.csv"
    code, text = run(capsys, "bench", files / "k4.txt", files / "p2.txt", files / "c4.txt",
                     "--problem", "pathwidth", "--out", out)
    rows = [json.loads(line) for line in text.splitlines()]
    assert code == 0 and [r["optimum"] for r in rows] == [1, 2, 3]
    assert out.read_text().startswith("graph,n,m,problem")


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "gridsat", "solve-cnf", str(files / "unsat.cnf")],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0 and proc.stdout.strip() == "UNSAT"
