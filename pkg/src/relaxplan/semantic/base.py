from __future__ import annotations

import abc
from dataclasses import dataclass, replace
from typing import Sequence

from ..checker import FeedbackItem
from ..pddl import DomainAst, Formula, ProblemAst
from ..scene import DistilledScene

CAPABILITIES = ("gen_domain", "gen_problem", "refine", "shift_goal", "relax_goal", "possibility")


class SemanticError(Exception):
    """Any failure at the semantic-backend boundary."""


class BackendError(SemanticError):
    def __init__(self, message: str, status: int | None = None):
        self.status = status
        super().__init__(message)


class UnparseableOutput(SemanticError):
    def __init__(self, message: str, raw: str = ""):
        self.raw = raw
        super().__init__(message)


class RetriesExhausted(UnparseableOutput):
    def __init__(self, attempts: int, raw: str = "", reason: str = ""):
        self.attempts = attempts
        super().__init__(f"no usable output after {attempts} attempt(s): {reason}", raw)


class NoProgress(SemanticError):
    """Refinement returned a problem structurally identical to its input."""


class NoAlternative(SemanticError):
    """Goal shifting has no untried substitute left."""


class NothingToRelax(SemanticError):
    """Goal relaxation has no droppable conjunct left."""


@dataclass(frozen=True)
class GoalSpec:
    text: str
    formula: Formula | None = None
    relaxation: int = 0
    shift: int = 0

    def __post_init__(self):
        if self.relaxation < 0 or self.shift < 0:
            raise ValueError("lineage indices must be non-negative")

    @property
    def lineage(self) -> tuple[int, int]:
        return self.relaxation, self.shift

    def shifted(self, **changes) -> "GoalSpec":
        return replace(self, shift=self.shift + 1, **changes)

    def relaxed(self, **changes) -> "GoalSpec":
        return replace(self, relaxation=self.relaxation + 1, **changes)


@dataclass(frozen=True)
class Verdict:
    possible: bool
    rationale: str


class SemanticBackend(abc.ABC):
    """Commonsense operators used to generate, repair and adapt problems."""

    name: str = "abstract"
    model: str | None = None
    capabilities: frozenset[str] = frozenset(CAPABILITIES)

    @abc.abstractmethod
    def gen_domain(self, goal: GoalSpec, scene: DistilledScene, desc: str) -> DomainAst: ...

    @abc.abstractmethod
    def gen_problem(self, domain: DomainAst, goal: GoalSpec, scene: DistilledScene) -> ProblemAst: ...

    @abc.abstractmethod
    def refine(self, problem: ProblemAst, domain: DomainAst, goal: GoalSpec, scene: DistilledScene,
               feedback: Sequence[FeedbackItem]) -> ProblemAst: ...

    @abc.abstractmethod
    def shift_goal(self, goal: GoalSpec, scene: DistilledScene) -> GoalSpec: ...

    @abc.abstractmethod
    def relax_goal(self, goal: GoalSpec, scene: DistilledScene) -> GoalSpec: ...

    @abc.abstractmethod
    def possibility_check(self, goal: GoalSpec, scene: DistilledScene) -> Verdict: ...
