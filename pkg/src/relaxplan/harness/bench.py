"""Run the pipeline over a task set and score every task."""

from __future__ import annotations

import hashlib
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from ..checker import validate_plan
from ..grounding import check_ground
from ..orchestrator import SolveConfig, SolveResult, solve
from ..scene import DistilledScene, distill, scatter_items
from ..semantic import RuleTable, ScriptedBackend, SemanticBackend
from .dataset import TaskSpec
from .metrics import Aggregates, TaskRecord, aggregate, aggregate_by_family

BackendFactory = Callable[[TaskSpec], SemanticBackend]


def task_seed(seed: int, task_id: str) -> int:
    """Scatter seed that depends only on the global seed and the task id."""
    digest = hashlib.sha256(f"{seed}:{task_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def scripted_backend(task: TaskSpec) -> ScriptedBackend:
    overrides = {"task_id": task.id, **task.script}
    return ScriptedBackend(RuleTable.for_family(task.family, overrides))


def prepare_scene(task: TaskSpec, seed: int) -> DistilledScene:
    scene = scatter_items(task.load_scene(), task.scatter_nodes(), task_seed(seed, task.id))
    return distill(scene)


@dataclass
class TaskRun:
    record: TaskRecord
    result: SolveResult | None = None
    scene: DistilledScene | None = None


def score(task: TaskSpec, result: SolveResult, scene: DistilledScene, check_grounding: bool = True) -> TaskRecord:
    """Re-check the returned plan independently of the orchestrator.

    With grounding disabled a validated plan counts as grounded, so the
    grounding rate equals the planning rate.
    """
    planned = (result.plan is not None and result.problem is not None
               and validate_plan(result.domain, result.problem, result.plan).ok)
    if check_grounding:
        grounded = planned and result.grounded and check_ground(result.plan, scene, result.domain).ok
    else:
        grounded = planned
    v = result.possibility_verdict
    stats = result.stats if planned else None
    return TaskRecord(
        task_id=task.id,
        family=task.family,
        success_planning=planned,
        success_grounding=grounded,
        possibility_verdict=v.possible if v is not None else None,
        plan_length=len(result.plan) if planned else None,
        planning_time_s=stats.wall_time if stats else None,
        expanded_nodes=stats.expanded_nodes if stats else None,
        relaxations=result.trace.total_relaxations,
        refinements_per_relaxation=result.trace.refinements_per_relaxation,
        outcome=result.outcome.value,
        designed_impossible=task.designed_impossible,
    )


def run_task(task: TaskSpec, cfg: SolveConfig, seed: int, backend_factory: BackendFactory | None = None) -> TaskRun:
    try:
        if backend_factory is not None:
            cfg = replace(cfg, backend=backend_factory(task))
        scene = prepare_scene(task, seed)
        result = solve(task.goal_text, scene, task.domain_desc, cfg)
        return TaskRun(score(task, result, scene, cfg.check_grounding), result, scene)
    except Exception as e:  # one broken task must not take the batch down
        rec = TaskRecord(task.id, task.family, outcome="crashed", designed_impossible=task.designed_impossible,
                         error=f"{type(e).__name__}: {e}\n{traceback.format_exc(limit=3)}")
        return TaskRun(rec)


@dataclass
class BenchReport:
    records: list[TaskRecord]
    overall: Aggregates
    families: dict[str, Aggregates]
    metadata: dict = field(default_factory=dict)
    runs: dict[str, TaskRun] = field(default_factory=dict, repr=False, compare=False)

    def recompute(self) -> "BenchReport":
        return build_report(self.records, self.metadata)

    def to_dict(self, *, timing: bool = True) -> dict:
        return {
            "metadata": dict(self.metadata),
            "overall": self.overall.to_dict(timing=timing),
            "families": {f: a.to_dict(timing=timing) for f, a in self.families.items()},
            "records": [r.to_dict(timing=timing) for r in self.records],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BenchReport":
        return cls(
            records=[TaskRecord.from_dict(r) for r in d["records"]],
            overall=Aggregates.from_dict(d["overall"]),
            families={f: Aggregates.from_dict(a) for f, a in d["families"].items()},
            metadata=dict(d.get("metadata") or {}),
        )


def build_report(records: Sequence[TaskRecord], metadata: dict | None = None) -> BenchReport:
    records = sorted(records, key=lambda r: r.task_id)
    return BenchReport(list(records), aggregate(records), aggregate_by_family(records), dict(metadata or {}))


def run_bench(tasks: Sequence[TaskSpec], cfg: SolveConfig, workers: int = 1, seed: int = 0,
              backend_factory: BackendFactory | None = None) -> BenchReport:
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1:
        runs = [run_task(t, cfg, seed, backend_factory) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(lambda t: run_task(t, cfg, seed, backend_factory), tasks))
    meta = {**cfg.to_dict(), "seed": seed}
    if backend_factory is not None and tasks:
        b = backend_factory(tasks[0])
        meta["backend"], meta["model"] = b.name, b.model
    report = build_report([r.record for r in runs], meta)
    report.runs = {r.record.task_id: r for r in runs}
    return report
