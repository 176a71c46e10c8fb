import json
import subprocess
import sys

import pytest

from treesolve.cli import build_parser, main
from treesolve.scenario_io import builtin_scenario_text, parse_scenario


@pytest.fixture()
def scenario_file(tmp_path):
    path = tmp_path / "illustrative.json"
    path.write_text(builtin_scenario_text())
    return str(path)


def test_solve_prints_score(scenario_file, capsys):
    assert main(["solve", scenario_file]) == 0
    out = capsys.readouterr().out
    assert out.startswith("score 0.0843672 (raw 8.43672)")


def test_solve_emit_stats(scenario_file, capsys):
    assert main(["solve", scenario_file, "--emit-stats"]) == 0
    out = capsys.readouterr().out
    assert "n_full 168" in out
    assert "n_reduced 92" in out
    assert "n_tree 37" in out
    assert "n_rewarding_sets 4" in out
    assert "t_total_s" in out


def test_solve_naive_same_score(scenario_file, capsys):
    assert main(["solve", scenario_file, "--naive"]) == 0
    naive_line = capsys.readouterr().out.splitlines()[0]
    assert main(["solve", scenario_file]) == 0
    accel_line = capsys.readouterr().out.splitlines()[0]
    assert naive_line == accel_line


def test_solve_writes_tree_json(scenario_file, tmp_path, capsys):
    out = tmp_path / "tree.json"
    assert main(["solve", scenario_file, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["nodes"][doc["root"]]["action"] == "a1"
    assert len(doc["nodes"]) == 37


def test_solve_writes_dot(scenario_file, tmp_path, capsys):
    out = tmp_path / "tree.dot"
    assert main(["solve", scenario_file, "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("digraph")


def test_solve_budget_override(scenario_file, capsys):
    assert main(["solve", scenario_file, "--budget", "0"]) == 0
    assert capsys.readouterr().out.startswith("score 0.0 (raw 0.0)")
    assert main(["solve", scenario_file, "--budget", "x"]) == 2


def test_validate(scenario_file, tmp_path, capsys):
    assert main(["validate", scenario_file]) == 0
    assert "ok" in capsys.readouterr().out
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1}')
    assert main(["validate", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "error:" in err
    assert main(["validate", str(tmp_path / "missing.json")]) == 2


def test_usage_errors_exit_1(capsys):
    assert main([]) == 1
    assert main(["frobnicate"]) == 1
    assert main(["solve"]) == 1
    assert main(["solve", "x", "--tie-break", "alphabetical"]) == 1


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0
    assert main(["solve", "--help"]) == 0


def test_node_cap_flag(scenario_file, capsys):
    assert main(["solve", scenario_file, "--node-cap", "5"]) == 3
    assert "error:" in capsys.readouterr().err


def test_node_cap_env(scenario_file, capsys, monkeypatch):
    monkeypatch.setenv("TREESOLVE_NODE_CAP", "5")
    assert main(["solve", scenario_file]) == 3
    monkeypatch.setenv("TREESOLVE_NODE_CAP", "lots")
    assert main(["solve", scenario_file]) == 2
    monkeypatch.delenv("TREESOLVE_NODE_CAP")
    assert main(["solve", scenario_file]) == 0


def test_timeout_exits_3(scenario_file, capsys):
    assert main(["solve", scenario_file, "--timeout", "0"]) == 3


def test_gen_stdout(capsys):
    assert main(["gen", "--n-actions", "8", "--budget", "5", "--seed", "3"]) == 0
    scn = parse_scenario(capsys.readouterr().out)
    assert scn.n_actions == 8


def test_gen_to_file(tmp_path, capsys):
    out = tmp_path / "gen.json"
    assert main(["gen", "--n-actions", "6", "--budget", "4", "--out", str(out)]) == 0
    assert main(["validate", str(out)]) == 0


def test_gen_rejects_bad_params(capsys):
    assert main(["gen", "--n-actions", "1", "--budget", "4"]) == 2


def test_bench_end_to_end(tmp_path, capsys):
    params = tmp_path / "params.json"
    params.write_text(
        json.dumps(
            {
                "instances": [
                    {"n_actions": 6, "budget": 4, "seed": 1},
                    {"n_actions": 8, "budget": 5, "seed": 2},
                ]
            }
        )
    )
    csv_path = tmp_path / "bench.csv"
    assert main(["bench", str(params), "--csv", str(csv_path)]) == 0
    assert csv_path.exists()
    assert (tmp_path / "bench_naive.csv").exists()
    out = capsys.readouterr().out
    assert "wrote" in out


def test_bench_rejects_bad_params_file(tmp_path, capsys):
    path = tmp_path / "params.json"
    path.write_text("[]")
    assert main(["bench", str(path), "--csv", str(tmp_path / "x.csv")]) == 2
    path.write_text('{"instances": [{"n_actions": 6}]}')
    assert main(["bench", str(path), "--csv", str(tmp_path / "x.csv")]) == 2


def test_lp_check(scenario_file, capsys):
    assert main(["lp-check", scenario_file]) == 0
    out = capsys.readouterr().out
    assert "lp-check: ok" in out
    assert main(["lp-check", scenario_file, "--backend", "highs", "--naive"]) == 0


def test_serve_parser_wiring():
    args = build_parser().parse_args(["serve", "--port", "9999"])
    assert args.port == 9999
    assert args.host == "127.0.0.1"


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "treesolve.cli", "--help"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "solve" in proc.stdout
