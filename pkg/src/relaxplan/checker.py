"""Static coherence checks and plan replay, reported as feedback items.

Findings never raise; they come back as :class:`FeedbackItem` entries so the
refinement loop can hand them to the semantic backend verbatim.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Literal as Lit

from .pddl import (
    Atom,
    DomainAst,
    Equals,
    ForAll,
    Formula,
    Not,
    Plan,
    ProblemAst,
    iter_atoms,
)
from .pddl.ast import And
from .pddl.semantics import ObjectUniverse, first_unsatisfied, ground_atom

Source = Lit["instantiate", "validate", "grounding"]
Severity = Lit["error", "warning"]


@dataclass(frozen=True)
class FeedbackItem:
    source: Source
    severity: Severity
    message: str
    locus: str | None = None
    # machine-readable tag and payload, used by the scripted backend
    code: str = ""
    data: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.message:
            raise ValueError("feedback message must be non-empty")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FeedbackItem":
        return cls(**d)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    items: tuple[FeedbackItem, ...] = ()
    final_state: frozenset[Atom] | None = None

    @property
    def errors(self) -> tuple[FeedbackItem, ...]:
        return tuple(i for i in self.items if i.severity == "error")

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "items": [i.to_dict() for i in self.items],
            "final_state": sorted(str(a) for a in self.final_state) if self.final_state is not None else None,
        }


def _report(items: list[FeedbackItem], final_state=None) -> ValidationReport:
    ok = not any(i.severity == "error" for i in items)
    return ValidationReport(ok, tuple(items), frozenset(final_state) if ok and final_state is not None else None)


# -- instantiation ---------------------------------------------------------


class _Checker:
    def __init__(self, domain: DomainAst, problem: ProblemAst):
        self.domain = domain
        self.problem = problem
        self.items: list[FeedbackItem] = []
        self.preds = {p.name: p for p in domain.predicates}
        self.types: dict[str, str] = {c.name: c.type for c in domain.constants}

    def err(self, message, locus, code, **data):
        self.items.append(FeedbackItem("instantiate", "error", message, locus, code, data))

    def warn(self, message, locus, code, **data):
        self.items.append(FeedbackItem("instantiate", "warning", message, locus, code, data))

    def run(self) -> ValidationReport:
        d, p = self.domain, self.problem
        if p.domain_name != d.name:
            self.err(f"problem declares domain '{p.domain_name}' but the domain is '{d.name}'",
                     "problem.domain", "domain-mismatch", got=p.domain_name, want=d.name)
        for idx, o in enumerate(p.objects):
            loc = f"objects[{idx}]"
            if o.name in self.types:
                self.err(f"object '{o.name}' declared more than once", loc, "duplicate-object", symbol=o.name)
                continue
            if not d.has_type(o.type):
                self.err(f"object '{o.name}' has undeclared type '{o.type}'", loc, "unknown-type",
                         symbol=o.name, type=o.type)
            self.types[o.name] = o.type
        for idx, atom in enumerate(p.init):
            self.check_atom(atom, {}, f"init[{idx}]")
        self.check_formula(p.goal, {}, "goal")
        self.check_reachability()
        return _report(self.items)

    def check_atom(self, atom: Atom, scope: dict[str, str], loc: str) -> bool:
        decl = self.preds.get(atom.predicate)
        if decl is None:
            self.err(f"predicate '{atom.predicate}' is not declared in the domain (in {atom})", loc,
                     "unknown-predicate", predicate=atom.predicate)
            return False
        if decl.arity != len(atom.args):
            self.err(f"predicate '{atom.predicate}' takes {decl.arity} argument(s) but {atom} has {len(atom.args)}",
                     loc, "arity-mismatch", predicate=atom.predicate, got=len(atom.args), want=decl.arity)
            return False
        good = True
        for arg, prm in zip(atom.args, decl.params):
            t = scope.get(arg) if arg.startswith("?") else self.types.get(arg)
            if t is None:
                what = "unbound variable" if arg.startswith("?") else "undeclared object"
                self.err(f"{what} '{arg}' in {atom}", loc, "undeclared-object", symbol=arg)
                good = False
            elif self.domain.has_type(t) and not self.domain.is_subtype(t, prm.type):
                self.err(f"'{arg}' of type '{t}' cannot fill parameter {prm.name} - {prm.type} of '{atom.predicate}'",
                         loc, "type-mismatch", symbol=arg, type=t, want=prm.type)
                good = False
        return good

    def check_formula(self, f: Formula, scope: dict[str, str], loc: str) -> None:
        if isinstance(f, Atom):
            self.check_atom(f, scope, loc)
        elif isinstance(f, Equals):
            for arg in (f.left, f.right):
                known = scope.get(arg) if arg.startswith("?") else self.types.get(arg)
                if known is None:
                    self.err(f"undeclared object '{arg}' in {f}", loc, "undeclared-object", symbol=arg)
        elif isinstance(f, Not):
            self.check_formula(f.arg, scope, loc)
        elif isinstance(f, And):
            for i, part in enumerate(f.parts):
                self.check_formula(part, scope, f"{loc}.and[{i}]")
        elif isinstance(f, ForAll):
            inner = dict(scope)
            for prm in f.params:
                if not self.domain.has_type(prm.type):
                    self.err(f"quantified variable {prm.name} has undeclared type '{prm.type}'", loc,
                             "unknown-type", symbol=prm.name, type=prm.type)
                inner[prm.name] = prm.type
            self.check_formula(f.body, inner, f"{loc}.forall")

    def check_reachability(self) -> None:
        added = {a.predicate for act in self.domain.actions for a in act.add_effects}
        deleted = {a.predicate for act in self.domain.actions for a in act.del_effects}
        init = set(self.problem.init)
        reported = set()
        for atom, positive in iter_atoms(self.problem.goal):
            if atom.predicate not in self.preds:
                continue
            ground = not any(a.startswith("?") for a in atom.args)
            if positive and atom.predicate not in added:
                if ground and atom in init:
                    continue
                if ("add", atom.predicate) in reported:
                    continue
                reported.add(("add", atom.predicate))
                self.err(f"goal predicate '{atom.predicate}' unreachable: no action adds it", "goal",
                         "unreachable-goal", predicate=atom.predicate)
            elif not positive and atom.predicate not in deleted:
                if ground and atom not in init:
                    continue
                if not ground and not any(a.predicate == atom.predicate for a in init):
                    continue
                if ("del", atom.predicate) in reported:
                    continue
                reported.add(("del", atom.predicate))
                self.err(f"negated goal predicate '{atom.predicate}' unreachable: no action deletes it", "goal",
                         "unreachable-goal", predicate=atom.predicate)


def instantiate_check(domain: DomainAst, problem: ProblemAst) -> ValidationReport:
    """Type/arity closure and goal reachability of a problem against its domain."""
    return _Checker(domain, problem).run()


# -- plan replay -----------------------------------------------------------


def apply_effects(state: Iterable[Atom], adds: Iterable[Atom], deletes: Iterable[Atom]) -> frozenset[Atom]:
    """Delete-then-add: an atom both added and deleted ends up true."""
    return frozenset((set(state) - set(deletes)) | set(adds))


def validate_plan(domain: DomainAst, problem: ProblemAst, plan: Plan) -> ValidationReport:
    """Replay ``plan`` from the initial state and check the goal at the end."""
    items: list[FeedbackItem] = []
    universe = ObjectUniverse(domain, problem)

    def fail(message, locus, code, **data):
        items.append(FeedbackItem("validate", "error", message, locus, code, data))
        return _report(items)

    state = frozenset(problem.init)
    for idx, step in enumerate(plan.steps, start=1):
        loc = f"step {idx}"
        schema = domain.action(step.name)
        if schema is None:
            return fail(f"step {idx} {step}: action '{step.name}' does not exist in the domain", loc,
                        "unknown-action", step=idx, action=step.name)
        if len(schema.parameters) != len(step.args):
            return fail(f"step {idx} {step}: '{step.name}' takes {len(schema.parameters)} argument(s), "
                        f"got {len(step.args)}", loc, "arity-mismatch", step=idx, action=step.name)
        binding = {}
        for prm, arg in zip(schema.parameters, step.args):
            if arg not in universe:
                return fail(f"step {idx} {step}: undeclared object '{arg}'", loc, "undeclared-object",
                            step=idx, symbol=arg)
            if not domain.is_subtype(universe.type_of[arg], prm.type):
                return fail(f"step {idx} {step}: '{arg}' of type '{universe.type_of[arg]}' does not match "
                            f"{prm.name} - {prm.type}", loc, "type-mismatch", step=idx, symbol=arg)
            binding[prm.name] = arg
        bad = first_unsatisfied(schema.precondition, state, universe, binding)
        if bad is not None:
            return fail(f"step {idx} {step}: precondition {bad} unsatisfied", loc, "precondition-unsatisfied",
                        step=idx, action=step.name, literal=str(bad))
        adds = [ground_atom(a, binding) for a in schema.add_effects]
        dels = [ground_atom(a, binding) for a in schema.del_effects]
        state = apply_effects(state, adds, dels)
    bad = first_unsatisfied(problem.goal, state, universe)
    if bad is not None:
        return fail(f"goal not satisfied after {len(plan)} step(s): {bad} is false in the final state", "goal",
                    "goal-unsatisfied", literal=str(bad))
    return _report(items, state)


def check(domain: DomainAst, problem: ProblemAst, plan: Plan | None) -> bool:
    """Plan feasibility check: a plan exists and replays to the goal."""
    return plan is not None and validate_plan(domain, problem, plan).ok


def render_feedback(report: ValidationReport | Iterable[FeedbackItem]) -> str:
    items = list(report.items if isinstance(report, ValidationReport) else report)
    if isinstance(report, ValidationReport) and report.ok and not items:
        return "validation passed"
    if not items:
        return "validation passed"
    ordered = [i for i in items if i.severity == "error"] + [i for i in items if i.severity != "error"]
    lines = []
    for it in ordered:
        where = f" ({it.locus})" if it.locus else ""
        lines.append(f"[{it.source}] {it.severity}{where}: {it.message}")
    return "\n".join(lines)


def report_json(report: ValidationReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True)
