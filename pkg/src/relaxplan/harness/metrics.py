"""Per-task records and the success-rate / plan-statistics aggregates."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import asdict, dataclass, field, fields
from statistics import fmean
from typing import Iterable, Sequence

TIMING_FIELDS = ("planning_time_s",)


@dataclass
class TaskRecord:
    task_id: str
    family: str = ""
    success_planning: bool = False
    success_grounding: bool = False
    possibility_verdict: bool | None = None
    plan_length: int | None = None
    planning_time_s: float | None = None
    expanded_nodes: int | None = None
    relaxations: int = 0
    refinements_per_relaxation: list[int] = field(default_factory=list)
    outcome: str = ""
    designed_impossible: bool = False
    error: str | None = None

    def __post_init__(self):
        if self.success_grounding and not self.success_planning:
            raise ValueError(f"{self.task_id}: grounded success requires a valid plan")

    def to_dict(self, *, timing: bool = True) -> dict:
        d = asdict(self)
        if not timing:
            for k in TIMING_FIELDS:
                d.pop(k)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TaskRecord":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})


@dataclass
class Aggregates:
    n: int = 0
    sr_ground_plan: float | None = None
    sr_plan_only: float | None = None
    sr_with_possibility: float | None = None
    avg_plan_length: float | None = None
    avg_time_s: float | None = None
    avg_expanded: float | None = None
    avg_relaxations: float | None = None
    refinements_curve: list[float] = field(default_factory=list)

    def to_dict(self, *, timing: bool = True) -> dict:
        d = asdict(self)
        if not timing:
            d.pop("avg_time_s")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Aggregates":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})


def _pct(count: int, n: int) -> float | None:
    return 100.0 * count / n if n else None


def _mean(values: Iterable[float | int | None]) -> float | None:
    vals = [v for v in values if v is not None]
    return fmean(vals) if vals else None


def refinements_curve(records: Sequence[TaskRecord]) -> list[float]:
    """Mean refinements at relaxation index 0, 1, 2, ... over the tasks that reached it."""
    by_index: dict[int, list[int]] = defaultdict(list)
    for r in records:
        for i, n in enumerate(r.refinements_per_relaxation):
            by_index[i].append(n)
    return [fmean(by_index[i]) for i in range(len(by_index))]


def aggregate(records: Sequence[TaskRecord]) -> Aggregates:
    """Success rates in percent; plan statistics averaged over tasks with a valid plan."""
    n = len(records)
    planned = [r for r in records if r.success_planning]
    return Aggregates(
        n=n,
        sr_ground_plan=_pct(sum(r.success_grounding for r in records), n),
        sr_plan_only=_pct(len(planned), n),
        # a negative possibility verdict fails the task regardless of outcome
        sr_with_possibility=_pct(sum(r.success_grounding and r.possibility_verdict is not False
                                     for r in records), n),
        avg_plan_length=_mean(r.plan_length for r in planned),
        avg_time_s=_mean(r.planning_time_s for r in planned),
        avg_expanded=_mean(r.expanded_nodes for r in planned),
        avg_relaxations=_mean(r.relaxations for r in records),
        refinements_curve=refinements_curve(records),
    )


def aggregate_by_family(records: Sequence[TaskRecord]) -> dict[str, Aggregates]:
    groups: dict[str, list[TaskRecord]] = defaultdict(list)
    for r in records:
        groups[r.family].append(r)
    return {fam: aggregate(groups[fam]) for fam in sorted(groups)}


def macro_average(values: Iterable[float | None]) -> float | None:
    """Unweighted mean of per-family figures, skipping undefined ones."""
    return _mean(values)
