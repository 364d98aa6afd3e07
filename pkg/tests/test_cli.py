import json
import subprocess
import sys

from relaxplan.cli import main
from relaxplan.harness import bundled_mini, parse_table

MINI = bundled_mini()
HC = MINI / "house_cleaning" / "hc_01"


def test_plan_prints_a_plan(fixtures, capsys):
    d, p = fixtures / "pddl" / "blocks_domain.pddl", fixtures / "pddl" / "blocks_problem.pddl"
    assert main(["plan", "-d", str(d), "-p", str(p), "--mode", "bfs"]) == 0
    out = capsys.readouterr()
    assert len(out.out.strip().splitlines()) == 6 and "outcome=solved" in out.err


def test_validate_and_ground_check(tmp_path, capsys):
    args = ["-d", str(HC / "domain.pddl")]
    assert main(["validate", *args, "-p", str(HC / "problem.pddl"), "--plan", str(HC / "plan.plan")]) == 0
    assert capsys.readouterr().out.strip() == "validation passed"
    bad = tmp_path / "bad.plan"
    bad.write_text("(pick robot no_such_thing living_room)\n")
    assert main(["ground-check", *args, "--plan", str(bad), "--scene", str(MINI / "scenes" / "allensville.json"),
                 "--json"]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["feedback"][0]["code"] == "unmatched-symbol"


def test_bench_writes_reports(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["bench", "--backend", "scripted", "--dataset", "mini", "--seed", "7", "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert parse_table(printed)["ALL"].sr_ground_plan == 100.0
    for name in ("report.txt", "report.csv", "report.json", "run.json",
                 "refinements_per_relaxation.png", "success_rates.png"):
        assert (out / name).is_file(), name
    assert json.loads((out / "run.json").read_text())["seed"] == 7


def test_solve_without_budget_fails_but_keeps_the_trace(tmp_path):
    out = tmp_path / "solve"
    code = main(["solve", "--dataset", "mini", "--task", "hc_03", "--max-outer", "1", "--max-inner", "1",
                 "--out", str(out)])
    assert code == 1
    trace = json.loads((out / "trace.json").read_text())
    assert trace["outcome"] == "exhausted" and len(trace["trace"]["steps"]) == 1


def test_usage_errors_exit_2(tmp_path):
    assert main(["solve", "--dataset", "mini", "--task", "nope"]) == 2
    assert main(["bench", "--dataset", str(tmp_path / "missing"), "--no-figures"]) == 2
    assert main(["plan", "-d", str(HC / "plan.plan"), "-p", str(HC / "problem.pddl")]) == 2
    assert main(["frobnicate"]) == 2


def test_dataset_verify(capsys):
    assert main(["dataset", "verify", "mini"]) == 0
    assert "total: 15 task(s)" in capsys.readouterr().out


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "relaxplan.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("relaxplan ")
