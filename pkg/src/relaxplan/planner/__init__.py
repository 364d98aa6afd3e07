"""Grounded forward state-space planner."""

from __future__ import annotations

from ..pddl import DomainAst, ProblemAst
from .heuristic import HAdd, h_add
from .search import Limits, Mode, Outcome, PlanResult, SearchStats, search
from .task import DEFAULT_GROUNDING_CAP, GroundingExplosion, GroundOp, GroundTask, ground


def plan(domain: DomainAst, problem: ProblemAst, mode: Mode | str = Mode.GBFS_HADD,
         limits: Limits | None = None) -> PlanResult:
    """Ground then search; the one-call entry point."""
    return search(ground(domain, problem), mode, limits)


__all__ = [
    "DEFAULT_GROUNDING_CAP", "GroundOp", "GroundTask", "GroundingExplosion", "HAdd", "Limits", "Mode",
    "Outcome", "PlanResult", "SearchStats", "ground", "h_add", "plan", "search",
]
