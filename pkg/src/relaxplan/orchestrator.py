"""The nested refine / shift-and-relax loop around the planner.

Each outer iteration regenerates the problem for the current goal, then
alternates validation and refinement until a plan checks out or the inner
budget runs out. A checked plan is grounded against the scene; if that fails,
the goal is shifted and relaxed and the next outer iteration starts.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Any, Callable

from .checker import FeedbackItem, instantiate_check, validate_plan
from .grounding import GroundingReport, check_ground, validate_ground
from .pddl import DomainAst, Plan, ProblemAst, render
from .planner import GroundingExplosion, Limits, Mode, Outcome, SearchStats, ground, search
from .scene import DistilledScene
from .semantic import GoalSpec, NoProgress, SemanticBackend, SemanticError, Verdict


class ConfigError(ValueError):
    pass


class SolveOutcome(str, enum.Enum):
    GROUNDED = "grounded"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class SolveConfig:
    backend: SemanticBackend | None = None
    max_outer: int = 4
    max_inner: int = 4
    mode: Mode = Mode.GBFS_HADD
    limits: Limits = field(default_factory=Limits)
    possibility_check: bool = True
    check_grounding: bool = True

    def __post_init__(self):
        if self.max_outer < 1 or self.max_inner < 1:
            raise ConfigError("max_outer and max_inner must be >= 1")

    def to_dict(self) -> dict:
        return {
            "backend": self.backend.name if self.backend else None,
            "model": self.backend.model if self.backend else None,
            "max_outer": self.max_outer,
            "max_inner": self.max_inner,
            "mode": Mode(self.mode).value,
            "max_expanded": self.limits.max_expanded,
            "max_seconds": self.limits.max_seconds,
            "possibility_check": self.possibility_check,
        }


@dataclass(frozen=True)
class TraceEvent:
    """One backend or planner call."""
    call: str
    outer: int
    inner: int
    ok: bool
    detail: str = ""


@dataclass
class TraceStep:
    i: int
    k: int
    n: int = 0
    goal_text: str = ""
    problem_ids: list[str] = field(default_factory=list)
    plan_outcome: str | None = None
    plan: Plan | None = None
    feedback: tuple[FeedbackItem, ...] = ()
    grounded: bool | None = None

    def to_dict(self) -> dict:
        return {
            "i": self.i, "k": self.k, "n": self.n,
            "goal": self.goal_text,
            "problems": list(self.problem_ids),
            "plan_outcome": self.plan_outcome,
            "plan": [str(s) for s in self.plan] if self.plan is not None else None,
            "feedback": [f.to_dict() for f in self.feedback],
            "grounded": self.grounded,
        }


@dataclass
class RelaxationTrace:
    steps: list[TraceStep] = field(default_factory=list)
    events: list[TraceEvent] = field(default_factory=list)
    problems: dict[str, str] = field(default_factory=dict)
    exhausted: str | None = None

    @property
    def semantic_distance(self) -> int:
        return self.steps[-1].k if self.steps else 0

    @property
    def total_relaxations(self) -> int:
        return self.steps[-1].i if self.steps else 0

    @property
    def total_refinements(self) -> int:
        return sum(s.n for s in self.steps)

    @property
    def refinements_per_relaxation(self) -> list[int]:
        return [s.n for s in self.steps]

    def backend_calls(self) -> int:
        return sum(1 for e in self.events if e.call != "plan")

    def snapshot(self, problem: ProblemAst) -> str:
        text = render(problem)
        for pid, t in self.problems.items():
            if t == text:
                return pid
        pid = f"p{len(self.problems)}"
        self.problems[pid] = text
        return pid

    def to_dict(self) -> dict:
        return {
            "steps": [s.to_dict() for s in self.steps],
            "events": [e.__dict__ for e in self.events],
            "problems": dict(self.problems),
            "exhausted": self.exhausted,
            "semantic_distance": self.semantic_distance,
            "total_relaxations": self.total_relaxations,
            "total_refinements": self.total_refinements,
        }


@dataclass
class SolveResult:
    outcome: SolveOutcome
    trace: RelaxationTrace
    plan: Plan | None = None
    problem: ProblemAst | None = None
    domain: DomainAst | None = None
    # search statistics of the returned plan, and summed over all planner calls
    stats: SearchStats | None = None
    total_stats: SearchStats = field(default_factory=SearchStats)
    possibility_verdict: Verdict | None = None
    goal: GoalSpec | None = None
    grounding: GroundingReport | None = None

    @property
    def grounded(self) -> bool:
        return self.outcome is SolveOutcome.GROUNDED


class _Run:
    def __init__(self, scene: DistilledScene, cfg: SolveConfig):
        self.scene = scene
        self.cfg = cfg
        self.backend = cfg.backend
        self.trace = RelaxationTrace()
        self.total = SearchStats()
        self.outer = 0
        self.inner = 0

    def call(self, name: str, fn: Callable[[], Any]) -> Any:
        """Run one backend call and log it; semantic errors are returned, not raised."""
        try:
            out = fn()
        except SemanticError as e:
            self.trace.events.append(TraceEvent(name, self.outer, self.inner, False, f"{type(e).__name__}: {e}"))
            return e
        self.trace.events.append(TraceEvent(name, self.outer, self.inner, True))
        return out

    def evaluate(self, domain: DomainAst, problem: ProblemAst, step: TraceStep):
        """Plan(P) followed by Check(plan): returns (plan, stats, feedback)."""
        report = instantiate_check(domain, problem)
        if not report.ok:
            step.plan_outcome = "rejected"
            return None, None, list(report.errors)
        try:
            result = search(ground(domain, problem), self.cfg.mode, self.cfg.limits)
        except GroundingExplosion as e:
            self.trace.events.append(TraceEvent("plan", self.outer, self.inner, False, str(e)))
            step.plan_outcome = Outcome.RESOURCE_LIMIT.value
            return None, None, [FeedbackItem("validate", "error", f"planner gave up: {e}", None, "no-plan")]
        self.trace.events.append(TraceEvent("plan", self.outer, self.inner, result.solved, result.outcome.value))
        for name in ("expanded_nodes", "generated_nodes", "wall_time"):
            setattr(self.total, name, getattr(self.total, name) + getattr(result.stats, name))
        step.plan_outcome = result.outcome.value
        if not result.solved:
            msg = ("no plan exists for this problem" if result.outcome is Outcome.UNSOLVABLE
                   else "planner hit its resource limit")
            return None, None, [FeedbackItem("validate", "error", msg, None, "no-plan")]
        check = validate_plan(domain, problem, result.plan)
        if not check.ok:
            return None, None, list(check.errors)
        return result.plan, result.stats, []


def solve(goal_text: str, scene: DistilledScene, desc: str, cfg: SolveConfig,
          initial_domain: DomainAst | None = None) -> SolveResult:
    if cfg.backend is None:
        raise ConfigError("no semantic backend configured")
    run = _Run(scene, cfg)
    trace = run.trace
    backend = run.backend
    goal = GoalSpec(goal_text)
    res = SolveResult(SolveOutcome.EXHAUSTED, trace, total_stats=run.total, goal=goal)

    if cfg.possibility_check:
        v = run.call("possibility", lambda: backend.possibility_check(goal, scene))
        res.possibility_verdict = None if isinstance(v, SemanticError) else v

    domain = initial_domain
    if domain is None:
        domain = run.call("gen_domain", lambda: backend.gen_domain(goal, scene, desc))
        if isinstance(domain, SemanticError):
            trace.exhausted = f"domain generation failed: {domain}"
            return res
    res.domain = domain

    carried: list[FeedbackItem] = []
    i = k = 0
    for outer in range(cfg.max_outer):
        run.outer, run.inner = outer, 0
        step = TraceStep(i, k, goal_text=goal.text)
        trace.steps.append(step)

        problem = run.call("gen_problem", lambda: backend.gen_problem(domain, goal, scene))
        plan = stats = None
        feedback: list[FeedbackItem] = []
        if isinstance(problem, SemanticError):
            problem = None
        else:
            step.problem_ids.append(trace.snapshot(problem))
            plan, stats, feedback = run.evaluate(domain, problem, step)

        while plan is None and step.n < cfg.max_inner:
            step.n += 1
            run.inner = step.n
            if problem is None:
                out = run.call("gen_problem", lambda: backend.gen_problem(domain, goal, scene))
            else:
                fb = feedback + carried
                cur = problem
                out = run.call("refine", lambda: backend.refine(cur, domain, goal, scene, fb))
            if isinstance(out, NoProgress):
                break
            if isinstance(out, SemanticError):
                continue
            problem = out
            step.problem_ids.append(trace.snapshot(problem))
            plan, stats, feedback = run.evaluate(domain, problem, step)

        step.plan = plan
        step.feedback = tuple(feedback)
        if plan is not None:
            res.plan, res.problem, res.stats = plan, problem, stats
            if not cfg.check_grounding:
                step.grounded = True
                res.outcome = SolveOutcome.GROUNDED
                return res
            report = check_ground(plan, scene, domain)
            res.grounding = report
            step.grounded = report.ok
            if report.ok:
                res.outcome = SolveOutcome.GROUNDED
                res.goal = goal
                return res
            carried = validate_ground(plan, scene, report)
            step.feedback = step.feedback + tuple(carried)
        else:
            carried = []

        if outer == cfg.max_outer - 1:
            break
        # shift then relax; a failed operator still advances its index
        shifted = run.call("shift_goal", lambda: backend.shift_goal(goal, scene))
        goal = goal.shifted() if isinstance(shifted, SemanticError) else shifted
        g = goal
        relaxed = run.call("relax_goal", lambda: backend.relax_goal(g, scene))
        goal = goal.relaxed() if isinstance(relaxed, SemanticError) else relaxed
        i, k = i + 1, k + 1
        if goal.lineage != (i, k):
            goal = replace(goal, relaxation=i, shift=k)
        res.goal = goal

    trace.exhausted = f"no grounded plan after {len(trace.steps)} outer iteration(s)"
    return res


def run_possibility_check(goal_text: str, scene: DistilledScene, backend: SemanticBackend) -> Verdict:
    return backend.possibility_check(GoalSpec(goal_text), scene)


def run_report(result: SolveResult, cfg: SolveConfig, *, timing: bool = True) -> dict:
    """Stable JSON-ready document describing one solve."""
    stats = result.stats.to_dict() if result.stats else None
    total = result.total_stats.to_dict()
    if not timing:
        if stats:
            stats.pop("wall_time")
        total.pop("wall_time")
    v = result.possibility_verdict
    return {
        "config": cfg.to_dict(),
        "outcome": result.outcome.value,
        "goal": result.goal.text if result.goal else None,
        "domain": render(result.domain) if result.domain else None,
        "problem": render(result.problem) if result.problem else None,
        "plan": [str(s) for s in result.plan] if result.plan is not None else None,
        "stats": stats,
        "total_stats": total,
        "possibility": {"possible": v.possible, "rationale": v.rationale} if v else None,
        "grounding": result.grounding.to_dict() if result.grounding else None,
        "trace": result.trace.to_dict(),
    }
