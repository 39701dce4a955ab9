import json
import subprocess
import sys

import pytest

from kolmonet.cli import main
from kolmonet.proxy import bundled_manifest


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


@pytest.fixture
def instance(tmp_path):
    path = tmp_path / "inst.txt"
    path.write_text("x=01\ny=1\nz=0\nw=-\n", encoding="utf-8")
    return str(path)


def test_complexity(capsys):
    code, rep = run(capsys, "complexity", "--u", "0101", "--v", "-")
    assert code == 0
    assert rep["result"]["complexity"] == 5 and rep["result"]["witness"] == "10101"
    assert set(rep) == {"command", "config", "seed", "result", "constants", "warnings"}


def test_complexity_with_table(capsys, tmp_path):
    table = tmp_path / "t.tsv"
    table.write_text("-\t00\t110\n", encoding="utf-8")
    code, rep = run(capsys, "complexity", "--system", str(table), "--u", "110", "--v", "00")
    assert rep["result"]["complexity"] == 4 and rep["result"]["witness"] == "0000"


def test_budget_marker(capsys):
    _, rep = run(capsys, "complexity", "--u", "0101", "--budget", "3")
    assert rep["result"]["complexity"] == "ABOVE_BUDGET" and rep["result"]["witness"] is None


def test_game_params(capsys):
    code, rep = run(capsys, "game", "params", "--theorem", "GAP_CPQ_E", "--epsilon", "1")
    spec = rep["result"]["spec"]
    assert code == 0 and (spec["n"], spec["m"], spec["j"]) == (10, 6, 9)
    assert all(row["ok"] for row in rep["result"]["inequalities"])
    _, rep = run(capsys, "game", "params", "--theorem", "GAP_PRIV_F", "--epsilon", "1", "--l", "2")
    spec = rep["result"]["spec"]
    assert (spec["n"], spec["k"], spec["m"], spec["j"]) == (27, 27, 22, 43)


def test_bad_params_exit_nonzero(capsys):
    code, rep = run(capsys, "game", "params", "--theorem", "GAP_CPQ_E", "--epsilon", "1", "--params", "10,6,12")
    assert code == 1 and not rep["result"]["ok"]
    code, _ = run(capsys, "game", "run", "--theorem", "GAP_CPQ_E", "--epsilon", "1", "--params", "10,6,12",
                  "--adversary", "greedy")
    assert code == 2


def test_game_run_writes_transcript(capsys, tmp_path):
    path = tmp_path / "t.jsonl"
    code, rep = run(capsys, "game", "run", "--theorem", "GAP_PRIV_E", "--epsilon", "1", "--adversary", "random",
                    "--seed", "4", "--max-events", "200", "--transcript", str(path))
    assert code == 0 and rep["result"]["verdict"]["verdict"] == "PASS"
    assert rep["result"]["transcript"] == str(path) and path.exists()
    code, again = run(capsys, "game", "run", "--theorem", "GAP_PRIV_E", "--epsilon", "1",
                      "--adversary", f"script:{path}", "--seed", "4", "--transcript", str(tmp_path / "r.jsonl"))
    assert again["result"]["fingerprint"] == rep["result"]["fingerprint"]


def test_missing_script_is_a_usage_error(capsys):
    code, _ = run(capsys, "game", "run", "--theorem", "GAP_CPQ_E", "--epsilon", "1", "--adversary", "script:nope")
    assert code == 2


def test_net_analyze(capsys, instance):
    code, rep = run(capsys, "net", "analyze", "--topology", "c", "--instance", instance, "--epsilon", "5")
    res = rep["result"]
    assert code == 0 and res["metrics"]["private_disclosure"] == 0
    assert len(res["cut_bounds"]) == 3 and res["minimal_value_formulas"]["minPrivate"] == 0
    _, rep = run(capsys, "net", "analyze", "--topology", "a", "--instance", instance, "--epsilon", "5",
                 "--pair=-,01")
    assert rep["result"]["minimal_value_formulas"]["minCpq"] == "NOT_A_PROFILE_FUNCTION"
    assert rep["result"]["pair"] == {"p": "-", "q": "01"}


def test_net_analyze_rejects_incomplete_instance(capsys, tmp_path):
    path = tmp_path / "i.txt"
    path.write_text("x=0\n", encoding="utf-8")
    code, _ = run(capsys, "net", "analyze", "--topology", "e", "--instance", str(path), "--epsilon", "3")
    assert code == 2


def test_net_search_with_csv(capsys, instance, tmp_path):
    table = tmp_path / "f.csv"
    code, rep = run(capsys, "net", "search", "--topology", "e", "--instance", instance, "--epsilon", "4",
                    "--budget", "4", "--csv", str(table))
    assert code == 0 and rep["result"]["feasible_pairs"] > 0
    lines = table.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("p,q,") and len(lines) == len(rep["result"]["frontier"]) + 1
    assert rep["warnings"]


@pytest.mark.parametrize("kind", ["infodist", "muchnik", "fmin"])
def test_net_witness(capsys, instance, kind):
    code, rep = run(capsys, "net", "witness", "--kind", kind, "--instance", instance)
    assert code == 0 and rep["result"]["found"]


def test_identities_bundle(capsys):
    code, rep = run(capsys, "identities", "--bundle", "--trials", "50")
    assert code == 0 and rep["result"]["passed"]


def test_proxy_commands(capsys):
    code, rep = run(capsys, "proxy", "ncd", "--corpus", str(bundled_manifest()))
    assert code == 0 and rep["result"]["files"] == 20
    code, rep = run(capsys, "proxy", "metrics", "--corpus", str(bundled_manifest()), "--topology", "c")
    assert code == 0 and rep["result"]["metrics"]["private_disclosure"] == 0 and rep["result"]["metrics"]["proxy"]


def test_threads_variable(capsys, monkeypatch):
    monkeypatch.setenv("KOLMONET_THREADS", "3")
    _, rep = run(capsys, "complexity", "--u", "1")
    assert rep["config"]["threads"] == 3
    monkeypatch.setenv("KOLMONET_THREADS", "zero")
    code, _ = run(capsys, "complexity", "--u", "1")
    assert code == 2


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as info:
        main(["complexity", "--u", "1", "--colour"])
    assert info.value.code == 2


def test_reports_are_byte_identical(tmp_path):
    argv = [sys.executable, "-m", "kolmonet", "game", "run", "--theorem", "GAP_CPQ_F", "--epsilon", "1",
            "--adversary", "random", "--seed", "2", "--max-events", "100", "--transcript", "t.jsonl"]
    first = subprocess.run(argv, cwd=tmp_path, capture_output=True, check=True).stdout
    second = subprocess.run(argv, cwd=tmp_path, capture_output=True, check=True).stdout
    assert first == second and b'"verdict": "PASS"' in first
