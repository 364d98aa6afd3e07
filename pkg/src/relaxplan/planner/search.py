from __future__ import annotations

import enum
import heapq
import math
import time
from collections import deque
from dataclasses import asdict, dataclass

from ..pddl import GroundAction, Plan
from .heuristic import HAdd
from .task import GroundTask


class Outcome(str, enum.Enum):
    SOLVED = "solved"
    UNSOLVABLE = "unsolvable"
    RESOURCE_LIMIT = "resource_limit"


class Mode(str, enum.Enum):
    BFS = "bfs"
    GBFS_HADD = "gbfs_hadd"


@dataclass
class SearchStats:
    expanded_nodes: int = 0
    generated_nodes: int = 0
    plan_length: int = 0
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Limits:
    max_expanded: int | None = None
    max_seconds: float | None = None


@dataclass
class PlanResult:
    outcome: Outcome
    stats: SearchStats
    plan: Plan | None = None

    @property
    def solved(self) -> bool:
        return self.outcome is Outcome.SOLVED


def _extract(task: GroundTask, parents: dict, state: int) -> Plan:
    steps = []
    while True:
        prev = parents[state]
        if prev is None:
            break
        state, ai = prev
        op = task.actions[ai]
        steps.append(GroundAction(op.name, op.args))
    steps.reverse()
    return Plan(tuple(steps))


def search(task: GroundTask, mode: Mode | str = Mode.GBFS_HADD, limits: Limits | None = None) -> PlanResult:
    """Forward search from the initial state.

    ``bfs`` returns a shortest plan. ``gbfs_hadd`` is greedy best-first on
    h_add with FIFO tie-breaking and pruning of dead ends (h = inf). Goal
    tests happen when a node is popped; every popped node counts as expanded.
    """
    mode = Mode(mode)
    limits = limits or Limits()
    stats = SearchStats(generated_nodes=1)
    start = time.perf_counter()

    def finish(outcome, plan=None):
        stats.wall_time = time.perf_counter() - start
        if plan is not None:
            stats.plan_length = len(plan)
        return PlanResult(outcome, stats, plan)

    def out_of_budget() -> bool:
        if limits.max_expanded is not None and stats.expanded_nodes >= limits.max_expanded:
            return True
        if limits.max_seconds is not None and time.perf_counter() - start > limits.max_seconds:
            return True
        return False

    if not task.goal_possible:
        return finish(Outcome.UNSOLVABLE)

    parents: dict[int, tuple[int, int] | None] = {task.init: None}
    ops = task.actions

    if mode is Mode.BFS:
        frontier: deque[int] = deque([task.init])
        while frontier:
            if out_of_budget():
                return finish(Outcome.RESOURCE_LIMIT)
            state = frontier.popleft()
            stats.expanded_nodes += 1
            if task.is_goal(state):
                return finish(Outcome.SOLVED, _extract(task, parents, state))
            for ai, op in enumerate(ops):
                if state & op.pre == op.pre and not state & op.neg:
                    succ = (state & ~op.delete) | op.add
                    stats.generated_nodes += 1
                    if succ not in parents:
                        parents[succ] = (state, ai)
                        frontier.append(succ)
        return finish(Outcome.UNSOLVABLE)

    h = HAdd(task)
    h0 = h(task.init)
    if math.isinf(h0):
        return finish(Outcome.UNSOLVABLE)
    counter = 0
    heap: list[tuple[float, int, int]] = [(h0, counter, task.init)]
    while heap:
        if out_of_budget():
            return finish(Outcome.RESOURCE_LIMIT)
        _, _, state = heapq.heappop(heap)
        stats.expanded_nodes += 1
        if task.is_goal(state):
            return finish(Outcome.SOLVED, _extract(task, parents, state))
        for ai, op in enumerate(ops):
            if state & op.pre == op.pre and not state & op.neg:
                succ = (state & ~op.delete) | op.add
                stats.generated_nodes += 1
                if succ in parents:
                    continue
                parents[succ] = (state, ai)
                hv = h(succ)
                if math.isinf(hv):
                    continue
                counter += 1
                heapq.heappush(heap, (hv, counter, succ))
    return finish(Outcome.UNSOLVABLE)
