"""Additive delete-relaxation heuristic with unit action costs."""

from __future__ import annotations

import heapq
import math

from .task import GroundTask


class HAdd:
    """Precomputed fact-to-action incidence for repeated h_add evaluation."""

    def __init__(self, task: GroundTask):
        self.task = task
        n = len(task.facts)
        self.pre_of: list[list[int]] = [[] for _ in range(n)]
        self.no_pre: list[int] = []
        for ai, op in enumerate(task.actions):
            if not op.pre_facts:
                self.no_pre.append(ai)
            for f in op.pre_facts:
                self.pre_of[f].append(ai)
        self.n_pre = [len(op.pre_facts) for op in task.actions]

    def __call__(self, state: int) -> float:
        task = self.task
        if not task.goal_possible:
            return math.inf
        goal = task.goal_facts
        if state & task.goal_pos == task.goal_pos:
            return 0.0
        n = len(task.facts)
        cost = [math.inf] * n
        heap: list[tuple[float, int]] = []
        s, i = state, 0
        while s:
            low = s & -s
            i = low.bit_length() - 1
            cost[i] = 0.0
            heap.append((0.0, i))
            s ^= low
        remaining = self.n_pre[:]
        acc = [0.0] * len(task.actions)
        ops = task.actions

        def fire(ai, c):
            for g in ops[ai].add_facts:
                if c < cost[g]:
                    cost[g] = c
                    heapq.heappush(heap, (c, g))

        heapq.heapify(heap)
        for ai in self.no_pre:
            fire(ai, 1.0)
        done = [False] * n
        goal_set = set(goal)
        pending_goals = len(goal_set)
        while heap and pending_goals:
            c, f = heapq.heappop(heap)
            if done[f] or c > cost[f]:
                continue
            done[f] = True
            if f in goal_set:
                pending_goals -= 1
            for ai in self.pre_of[f]:
                remaining[ai] -= 1
                acc[ai] += c
                if remaining[ai] == 0:
                    fire(ai, acc[ai] + 1.0)
        return float(sum(cost[g] for g in goal))


def h_add(task: GroundTask, state: int) -> float:
    """h_add(state): sum over goal atoms of their relaxed achievement cost."""
    return HAdd(task)(state)
