"""Deterministic, table-driven stand-in for the language-model backend.

A :class:`RuleTable` merges a task family's defaults (types, initial-state
templates, substitution lists) with per-task overrides (goal formula,
droppable conjuncts, injected defects). Every operator is a pure function of
its inputs and the table.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Any, Mapping, Sequence

from ..checker import FeedbackItem
from ..pddl import (
    And,
    Atom,
    DomainAst,
    Formula,
    ProblemAst,
    TypedName,
    conjuncts,
    formula_symbols,
    parse_atom,
    parse_domain,
    parse_formula,
    substitute,
)
from ..scene import DistilledScene, label_of, lookup_object, lookup_room, normalize_symbol
from .base import GoalSpec, NoAlternative, NoProgress, NothingToRelax, SemanticBackend, Verdict

FAMILY_FILES = {
    "DiningSetup": "dining_setup",
    "HouseCleaning": "house_cleaning",
    "PCAssembly": "pc_assembly",
    "Laundry": "laundry",
    "OfficeSetup": "office_setup",
}


class RuleTableError(ValueError):
    pass


@dataclass(frozen=True)
class RelaxEntry:
    name: str
    literals: tuple[Formula, ...]
    phrase: str = ""


@dataclass(frozen=True)
class RuleTable:
    family: str
    domain_text: str
    task_id: str = "task"
    agent: str = "robot"
    agent_type: str = "agent"
    room_type: str = "room"
    start_room: str | None = None
    agent_init: tuple[str, ...] = ()
    object_init: tuple[str, ...] = ()
    types: Mapping[str, str] = field(default_factory=dict)
    substitutions: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    goal: Formula | None = None
    relax_order: tuple[RelaxEntry, ...] = ()
    defects: Mapping[int, tuple[str, ...]] = field(default_factory=dict)
    hallucinate: bool = False
    hallucinated_init: tuple[str, ...] = ()
    extra_init: tuple[str, ...] = ()

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "RuleTable":
        subs = {k: tuple(v) for k, v in (d.get("substitutions") or {}).items()}
        for cap, ranked in subs.items():
            if not ranked:
                raise RuleTableError(f"substitution list for {cap!r} is empty")
        goal = parse_formula(d["goal"]) if d.get("goal") else None
        relax = []
        for e in d.get("relax_order") or []:
            lits = tuple(parse_formula(t) for t in e["literals"])
            if not lits:
                raise RuleTableError(f"relax entry {e.get('name')!r} names no literals")
            if goal is not None:
                present = set(conjuncts(goal))
                for lit in lits:
                    if lit not in present:
                        raise RuleTableError(f"relax entry literal {lit} is not a goal conjunct")
            relax.append(RelaxEntry(e.get("name", str(lits[0])), lits, e.get("phrase", "")))
        return cls(
            family=d["family"],
            domain_text=d["domain_text"],
            task_id=d.get("task_id", "task"),
            agent=d.get("agent", "robot"),
            agent_type=d.get("agent_type", "agent"),
            room_type=d.get("room_type", "room"),
            start_room=d.get("start_room"),
            agent_init=tuple(d.get("agent_init", ())),
            object_init=tuple(d.get("object_init", ())),
            types=dict(d.get("types") or {}),
            substitutions=subs,
            goal=goal,
            relax_order=tuple(relax),
            defects={int(k): tuple(v) for k, v in (d.get("defects") or {}).items()},
            hallucinate=bool(d.get("hallucinate", False)),
            hallucinated_init=tuple(d.get("hallucinated_init", ())),
            extra_init=tuple(d.get("extra_init", ())),
        )

    @classmethod
    def for_family(cls, family: str, overrides: Mapping[str, Any] | None = None) -> "RuleTable":
        """Bundled family table, with task-level keys layered on top."""
        stem = FAMILY_FILES.get(family)
        if stem is None:
            raise RuleTableError(f"no rule table for family {family!r}")
        base = resources.files(__package__).joinpath("rules")
        d = json.loads(base.joinpath(f"{stem}.json").read_text())
        d["domain_text"] = base.joinpath(d.pop("domain_file")).read_text()
        d.update(overrides or {})
        return cls.from_dict(d)

    def capability_of(self, label: str) -> tuple[str, tuple[str, ...]] | None:
        for cap, ranked in sorted(self.substitutions.items()):
            if label in ranked:
                return cap, ranked
        return None


def _present(symbol: str, scene: DistilledScene, agent: str) -> bool:
    if normalize_symbol(symbol) == normalize_symbol(agent):
        return True
    return lookup_object(scene, symbol) is not None or lookup_room(scene, symbol)[0] is not None


def _instance_of(label: str, scene: DistilledScene) -> str:
    for e in scene.entries:
        if label_of(e.object_id) == label:
            return e.object_id
    return f"{label}_1"


def _rewrite_text(text: str, old_label: str, new_label: str) -> str:
    """Swap the object noun in a goal sentence; say so explicitly if it is not found."""
    old = old_label.replace("_", " ")
    new = new_label.replace("_", " ")
    pattern = rf"\b(the|a|an|with|some)\s+{re.escape(old)}\b"
    out, count = re.subn(pattern, lambda m: f"{m.group(1)} {new}", text, flags=re.IGNORECASE)
    if count:
        return out
    return f"{text.rstrip().rstrip('.')} with the {new} instead of the {old}."


class ScriptedBackend(SemanticBackend):
    name = "scripted"
    model = "rule-table"

    def __init__(self, rules: RuleTable):
        self.rules = rules
        self._domain = parse_domain(rules.domain_text)

    def gen_domain(self, goal: GoalSpec, scene: DistilledScene, desc: str) -> DomainAst:
        if not desc:
            raise ValueError("domain description must be non-empty")
        return self._domain

    # -- problems -----------------------------------------------------------

    def _goal_formula(self, goal: GoalSpec) -> Formula:
        if goal.formula is not None:
            return goal.formula
        if self.rules.goal is None:
            raise NoAlternative(f"no goal formalization known for {goal.text!r}")
        return self.rules.goal

    def _start_room(self, scene: DistilledScene) -> str:
        r = self.rules.start_room
        if r and r in scene.room_ids:
            return r
        return sorted(scene.room_ids)[0]

    def _object_decl(self, oid: str) -> TypedName | None:
        t = self.rules.types.get(label_of(oid))
        return TypedName(oid, t) if t else None

    def _fill(self, templates, **fmt) -> list[Atom]:
        return [parse_atom(t.format(**fmt)) for t in templates]

    def gen_problem(self, domain: DomainAst, goal: GoalSpec, scene: DistilledScene) -> ProblemAst:
        r = self.rules
        start = self._start_room(scene)
        objects = [TypedName(r.agent, r.agent_type)]
        objects += [TypedName(room, r.room_type) for room in scene.room_ids]
        init = self._fill(r.agent_init, agent=r.agent, start_room=start)
        for e in scene.entries:
            decl = self._object_decl(e.object_id)
            if decl is None:
                continue
            objects.append(decl)
            init += self._fill(r.object_init, id=e.object_id, room=e.room_id, start_room=start)
        formula = self._goal_formula(goal)
        declared = {o.name for o in objects}
        if r.hallucinate:
            for sym in sorted(formula_symbols(formula) - declared):
                decl = self._object_decl(sym)
                if decl is None:
                    continue
                objects.append(decl)
                declared.add(sym)
                init += self._fill(r.hallucinated_init, id=sym, start_room=start)
        for t in r.extra_init:
            atom = parse_atom(t)
            if all(a in declared for a in atom.args):
                init.append(atom)
        init += [parse_atom(t) for t in r.defects.get(goal.relaxation, ())]
        init = list(dict.fromkeys(init))
        return ProblemAst(f"{r.task_id}-r{goal.relaxation}-s{goal.shift}", domain.name,
                          tuple(objects), tuple(init), formula)

    def refine(self, problem: ProblemAst, domain: DomainAst, goal: GoalSpec, scene: DistilledScene,
               feedback: Sequence[FeedbackItem]) -> ProblemAst:
        """Apply the fix for the first actionable feedback item."""
        if not feedback:
            raise ValueError("refinement needs feedback")
        for item in feedback:
            fixed = self._fix(problem, domain, scene, item)
            if fixed is not None and fixed != problem:
                return fixed
        raise NoProgress("no feedback item could be acted upon")

    def _fix(self, p: ProblemAst, domain: DomainAst, scene: DistilledScene, item: FeedbackItem):
        code, data = item.code, item.data
        if code == "unknown-predicate":
            init = tuple(a for a in p.init if a.predicate != data["predicate"])
            return replace(p, init=init)
        if code == "arity-mismatch" and item.source == "instantiate":
            want = data["want"]
            init = tuple(Atom(a.predicate, a.args[:want]) if a.predicate == data["predicate"] else a
                         for a in p.init)
            return replace(p, init=tuple(dict.fromkeys(init)))
        if code == "undeclared-object":
            sym = data["symbol"]
            entry = lookup_object(scene, sym)
            decl = self._object_decl(sym)
            if entry is None or decl is None or sym.startswith("?"):
                return None
            start = self._start_room(scene)
            init = p.init + tuple(self._fill(self.rules.object_init, id=sym, room=entry.room_id, start_room=start))
            return replace(p, objects=p.objects + (decl,), init=tuple(dict.fromkeys(init)))
        if code == "duplicate-object":
            seen, objs = set(), []
            for o in p.objects:
                if o.name not in seen:
                    objs.append(o)
                    seen.add(o.name)
            return replace(p, objects=tuple(objs))
        if code == "unknown-type":
            decl = self._object_decl(data.get("symbol", ""))
            if decl is None or not domain.has_type(decl.type):
                return None
            return replace(p, objects=tuple(decl if o.name == decl.name else o for o in p.objects))
        if code == "unmatched-symbol":
            # only trust candidates of the same category; anything else is a goal shift
            old = data["symbol"]
            cands = [c for c in data.get("candidates") or [] if label_of(c) == label_of(old)]
            if not cands:
                return None
            new = cands[0]
            mapping = {old: new}
            objs, seen = [], set()
            for o in p.objects:
                name = mapping.get(o.name, o.name)
                if name not in seen:
                    objs.append(TypedName(name, o.type))
                    seen.add(name)
            init = tuple(dict.fromkeys(substitute(a, mapping) for a in p.init))
            return replace(p, objects=tuple(objs), init=init, goal=substitute(p.goal, mapping))
        return None

    # -- goal adaptation --------------------------------------------------

    def _missing(self, formula: Formula, scene: DistilledScene) -> list[str]:
        return sorted(s for s in formula_symbols(formula) if not _present(s, scene, self.rules.agent))

    def _next_substitute(self, symbol: str) -> str | None:
        label = label_of(symbol)
        found = self.rules.capability_of(label)
        if found is None:
            return None
        ranked = found[1]
        pos = ranked.index(label)
        return ranked[pos + 1] if pos + 1 < len(ranked) else None

    def shift_goal(self, goal: GoalSpec, scene: DistilledScene) -> GoalSpec:
        """Swap each ungroundable goal object for the next ranked substitute."""
        formula = self._goal_formula(goal)
        missing = self._missing(formula, scene)
        if not missing:
            return goal.shifted(formula=formula)
        mapping: dict[str, str] = {}
        text = goal.text
        for sym in missing:
            nxt = self._next_substitute(sym)
            if nxt is None:
                continue
            mapping[sym] = _instance_of(nxt, scene)
            text = _rewrite_text(text, label_of(sym), nxt)
        if not mapping:
            raise NoAlternative(f"no untried substitute for {', '.join(missing)}")
        return goal.shifted(text=text, formula=substitute(formula, mapping))

    def relax_goal(self, goal: GoalSpec, scene: DistilledScene) -> GoalSpec:
        """Retain the goal while its missing objects can still be substituted;
        otherwise drop the top droppable conjunct."""
        formula = self._goal_formula(goal)
        missing = self._missing(formula, scene)
        if all(self._next_substitute(sym) is not None for sym in missing):
            return goal.relaxed(formula=formula)
        parts = list(conjuncts(formula))
        for entry in self.rules.relax_order:
            if any(lit in parts for lit in entry.literals):
                kept = tuple(c for c in parts if c not in entry.literals)
                text = goal.text.replace(entry.phrase, "") if entry.phrase else goal.text
                return goal.relaxed(text=text, formula=And(kept))
        raise NothingToRelax("no droppable conjunct left in the goal")

    def possibility_check(self, goal: GoalSpec, scene: DistilledScene) -> Verdict:
        formula = self._goal_formula(goal)
        blocked = []
        for sym in self._missing(formula, scene):
            found = self.rules.capability_of(label_of(sym))
            alts = {l for l in (found[1] if found else ()) if l != label_of(sym)}
            if not any(label_of(e.object_id) in alts for e in scene.entries):
                blocked.append(sym)
        if blocked:
            return Verdict(False, f"not available and not substitutable in the scene: {', '.join(blocked)}")
        return Verdict(True, "every required object is present or has a substitute in the scene")
