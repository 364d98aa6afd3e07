import json

import pytest

from backends import Recording, Stubborn, Stuck
from relaxplan.checker import validate_plan
from relaxplan.grounding import check_ground
from relaxplan.harness import bundled_mini, load_dataset, prepare_scene, scripted_backend
from relaxplan.orchestrator import ConfigError, SolveConfig, SolveOutcome, run_report, solve
from relaxplan.pddl import conjuncts, parse_formula
from relaxplan.scene import distill, parse_scene

TASKS = {t.id: t for t in load_dataset(bundled_mini())}
EMPTY = distill(parse_scene(json.dumps({"scene_id": "e", "rooms": [{"id": "hall"}], "objects": []})))


def run(task_id, **cfg):
    task = TASKS[task_id]
    scene = prepare_scene(task, 0)
    backend = Recording(scripted_backend(task))
    result = solve(task.goal_text, scene, task.domain_desc, SolveConfig(backend=backend, **cfg))
    return result, scene, backend


def test_fast_path_needs_no_refinement():
    result, scene, backend = run("hc_01")
    assert result.outcome is SolveOutcome.GROUNDED
    assert [(s.i, s.k, s.n) for s in result.trace.steps] == [(0, 0, 0)]
    assert [op for op, _ in backend.calls] == ["possibility", "gen_domain", "gen_problem"]
    assert validate_plan(result.domain, result.problem, result.plan).ok
    assert check_ground(result.plan, scene, result.domain).ok


def test_hallucinated_tool_is_shifted_to_a_substitute():
    result, scene, _ = run("hc_03")
    assert result.grounded
    assert result.goal.lineage == (1, 1)
    assert result.trace.refinements_per_relaxation == [0, 0]
    assert result.trace.steps[0].grounded is False
    assert any(f.code == "unmatched-symbol" for f in result.trace.steps[0].feedback)
    assert "sponge_1" in {a for s in result.plan for a in s.args}


def test_defect_is_refined_away():
    result, _, backend = run("os_01")
    assert result.grounded and result.trace.refinements_per_relaxation == [1]
    assert [op for op, _ in backend.calls].count("refine") == 1


def test_never_solvable_goal_exhausts_both_budgets():
    cfg = SolveConfig(backend=Stubborn(), max_outer=4, max_inner=4)
    result = solve("open the door", EMPTY, "doors", cfg)
    assert result.outcome is SolveOutcome.EXHAUSTED and result.plan is None
    assert [(s.i, s.k) for s in result.trace.steps] == [(0, 0), (1, 1), (2, 2), (3, 3)]
    assert all(s.n == 4 for s in result.trace.steps)
    # no shift or relax after the last outer iteration
    assert result.trace.backend_calls() == 2 + 4 * (1 + 4 + 2) - 2
    assert result.trace.exhausted


@pytest.mark.parametrize("outer,inner", [(1, 1), (2, 3), (3, 1), (4, 4)])
def test_backend_call_budget(outer, inner):
    for backend in (Stubborn(), Stuck(), Stubborn(fail={"shift_goal", "relax_goal"})):
        rec = Recording(backend)
        solve("open the door", EMPTY, "doors", SolveConfig(backend=rec, max_outer=outer, max_inner=inner))
        assert len(rec.calls) <= outer * (inner + 3) + 2


def test_no_progress_ends_the_inner_loop():
    result = solve("open the door", EMPTY, "doors", SolveConfig(backend=Stuck(), max_outer=2))
    assert [s.n for s in result.trace.steps] == [1, 1]


def test_failing_refinements_consume_inner_iterations():
    result = solve("open the door", EMPTY, "doors",
                   SolveConfig(backend=Stubborn(fail={"refine"}), max_outer=1, max_inner=3))
    assert result.trace.steps[0].n == 3
    assert [e.ok for e in result.trace.events if e.call == "refine"] == [False] * 3


def test_failed_problem_generation_is_retried_inside_the_inner_loop():
    result = solve("open the door", EMPTY, "doors",
                   SolveConfig(backend=Stubborn(fail={"gen_problem"}), max_outer=1, max_inner=2))
    assert [e.call for e in result.trace.events] == ["possibility", "gen_domain", "gen_problem",
                                                    "gen_problem", "gen_problem"]
    assert result.outcome is SolveOutcome.EXHAUSTED


def test_failed_goal_operators_still_advance_lineage():
    rec = Recording(Stubborn(fail={"shift_goal", "relax_goal"}))
    result = solve("open the door", EMPTY, "doors", SolveConfig(backend=rec, max_outer=3, max_inner=1))
    assert [(s.i, s.k) for s in result.trace.steps] == [(0, 0), (1, 1), (2, 2)]
    assert result.goal.lineage == (2, 2)


def test_domain_failure_exhausts_immediately():
    result = solve("open the door", EMPTY, "doors", SolveConfig(backend=Stubborn(fail={"gen_domain"})))
    assert result.outcome is SolveOutcome.EXHAUSTED and not result.trace.steps
    assert "domain generation failed" in result.trace.exhausted


def test_missing_backend_and_bad_budgets():
    with pytest.raises(ConfigError):
        solve("g", EMPTY, "d", SolveConfig())
    with pytest.raises(ConfigError):
        SolveConfig(backend=Stubborn(), max_outer=0)


def test_trace_logs_every_backend_call():
    for task_id in TASKS:
        result, _, backend = run(task_id)
        logged = [e.call for e in result.trace.events if e.call != "plan"]
        assert logged == [op for op, _ in backend.calls], task_id


def test_grounded_results_are_sound_and_goals_only_weaken():
    for task_id, task in TASKS.items():
        result, scene, backend = run(task_id)
        assert result.grounded, task_id
        assert validate_plan(result.domain, result.problem, result.plan).ok
        assert check_ground(result.plan, scene, result.domain).ok
        # relaxation keeps a subset of the goal it was given
        for op, before, after in backend.goals_out:
            if op == "relax_goal" and before.formula is not None:
                assert set(conjuncts(after.formula)) <= set(conjuncts(before.formula))
        if result.goal.formula is not None:
            original = conjuncts(parse_formula(task.script["goal"]))
            assert len(conjuncts(result.goal.formula)) <= len(original)


def test_solve_is_deterministic():
    docs = [run_report(run("la_03")[0], SolveConfig(), timing=False) for _ in range(2)]
    assert docs[0] == docs[1]
    assert docs[0]["trace"]["total_relaxations"] == 2


def test_grounding_can_be_disabled():
    result, _, _ = run("hc_03", check_grounding=False)
    assert result.grounded and result.goal.lineage == (0, 0)
