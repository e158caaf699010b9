import csv
import io
import json
import subprocess
import sys

import pytest

from meetlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_gen_round_trip(tmp_path, capsys):
    code, out, _ = run(capsys, "gen", "--family", "cycle", "--n", "5")
    assert code == 0
    f = tmp_path / "c5.txt"
    f.write_text(out)
    code, out2, _ = run(capsys, "gen", "--graph", str(f), "--family", "cycle", "--format", "json")
    assert code == 0 and json.loads(out2)["m"] == 5


def test_hitting_table(capsys):
    code, out, _ = run(capsys, "hitting", "--family", "path", "--n", "2")
    assert code == 0
    table = rows(out)
    assert table[0][1:] == ["v:0", "v:1", "i:0>1", "i:1>0"]
    code, out, _ = run(capsys, "hitting", "--family", "path", "--n", "3", "--atomic", "--format", "json")
    assert json.loads(out)["values"][0][2] == 4.0


def test_hitting_oracle_matches_formula(capsys):
    _, a, _ = run(capsys, "hitting", "--family", "star", "--n", "5", "--format", "json")
    _, b, _ = run(capsys, "hitting", "--family", "star", "--n", "5", "--format", "json", "--oracle")
    va, vb = json.loads(a)["values"], json.loads(b)["values"]
    assert max(abs(x - y) for ra, rb in zip(va, vb) for x, y in zip(ra, rb)) <= 1e-9


def test_check_triangle_exit_codes(capsys):
    code, out, _ = run(capsys, "hitting", "--family", "complete", "--n", "4", "--check-triangle")
    assert code == 0
    assert rows(out)[0] == ["check", "max_residual", "triples"]
    code, _, _ = run(capsys, "hitting", "--family", "complete", "--n", "4", "--check-triangle",
                     "--tol", "-1")
    assert code == 1


def test_hidden(capsys):
    code, out, _ = run(capsys, "hidden", "--family", "path", "--n", "2", "--format", "json")
    info = json.loads(out)
    assert code == 0 and info["chosen_hidden"] == "i:0>1"
    assert {"i:0>1", "i:1>0"} <= set(info["hidden_states"])
    code, out, _ = run(capsys, "hidden", "--family", "path", "--n", "2", "--relation")
    assert code == 0 and len(rows(out)) == 5


def test_meeting_csv(capsys):
    code, out, _ = run(capsys, "meeting", "--family", "path", "--n", "2", "--pairs", "v:0,v:1")
    table = rows(out)
    assert code == 0
    assert table[0] == ["config", "M", "Phi", "theorem1", "slack"]
    assert [float(x) for x in table[1][1:]] == pytest.approx([2.0, 2.0, 2.0, 0.0])


def test_policy_out_then_simulate(tmp_path, capsys):
    pol = tmp_path / "pol.json"
    code, _, _ = run(capsys, "meeting", "--family", "complete", "--n", "3", "--policy-out", str(pol))
    assert code == 0 and json.loads(pol.read_text())["mode"] == "nonatomic"
    hist = tmp_path / "hist.csv"
    code, out, _ = run(capsys, "simulate", "--scheduler", "optimal", "--policy", str(pol),
                       "--trials", "300", "--seed", "3", "--histogram-out", str(hist))
    res = json.loads(out)
    assert code == 0 and res["met"] == 300 and not res["all_timed_out"]
    assert rows(hist.read_text())[0] == ["round", "count"]


def test_simulate_all_timed_out_is_not_an_error(capsys):
    code, out, _ = run(capsys, "simulate", "--family", "cycle", "--n", "4", "--scheduler",
                       "avoid-original", "--meet-mode", "original", "--start", "v:0,v:2",
                       "--trials", "20", "--max-rounds", "500")
    res = json.loads(out)
    assert code == 0 and res["all_timed_out"] and res["timeouts"] == 20


def test_simulate_csv(capsys):
    code, out, _ = run(capsys, "simulate", "--family", "path", "--n", "2", "--format", "csv",
                       "--trials", "10")
    assert code == 0 and ["mean", "2.0"] in rows(out)


def test_verify_single_graph(capsys):
    code, out, _ = run(capsys, "verify", "--family", "cycle", "--n", "4", "--trials", "50",
                       "--rounds", "500")
    assert code == 0
    assert "overall: PASS" in out and "checks -> results:" in out


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "complete", "--n-min", "3", "--n-max", "4")
    assert code == 0 and len(rows(out)) == 3


@pytest.mark.parametrize("argv", [
    ["gen"],
    ["sweep", "--family", "path", "--n-min", "5", "--n-max", "3"],
    ["meeting", "--family", "path", "--n", "3", "--pairs", "v:0"],
    ["simulate", "--scheduler", "optimal", "--family", "path", "--n", "3"],
    ["hitting", "--graph", "/nonexistent/graph.txt"],
    ["hitting", "--family", "path", "--n", "1"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("meetlab: error:")


def test_malformed_graph_names_line(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("3 2\n0 1\n1 x\n")
    code, _, err = run(capsys, "hitting", "--graph", str(f))
    assert code == 2 and "line 3" in err


def test_computational_failure_exits_1(capsys):
    code, _, err = run(capsys, "meeting", "--family", "path", "--n", "4", "--max-iters", "2")
    assert code == 1 and "NotConverged" in err


def test_graph_from_stdin_via_module():
    proc = subprocess.run([sys.executable, "-m", "meetlab", "gen", "--graph", "-", "--family", "path"],
                          input="2 1\n0 1\n", capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.split()[:2] == ["2", "1"]
