"""Immutable syntax trees for the supported PDDL subset.

The subset is STRIPS with typing, negative preconditions, equality and
universally quantified preconditions/goals. Symbols are stored lowercase.
Every node is a frozen dataclass, so structural equality is plain ``==``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

ROOT_TYPE = "object"


@dataclass(frozen=True)
class TypedName:
    name: str
    type: str = ROOT_TYPE

    def __str__(self) -> str:
        return f"{self.name} - {self.type}"


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return f"({self.predicate})"
        return f"({self.predicate} {' '.join(self.args)})"


@dataclass(frozen=True)
class Equals:
    left: str
    right: str

    def __str__(self) -> str:
        return f"(= {self.left} {self.right})"


@dataclass(frozen=True)
class Not:
    arg: Union[Atom, Equals]

    def __str__(self) -> str:
        return f"(not {self.arg})"


@dataclass(frozen=True)
class And:
    parts: tuple["Formula", ...] = ()

    def __str__(self) -> str:
        return "(and" + "".join(" " + str(p) for p in self.parts) + ")"


@dataclass(frozen=True)
class ForAll:
    params: tuple[TypedName, ...]
    body: "Formula"

    def __str__(self) -> str:
        ps = " ".join(str(p) for p in self.params)
        return f"(forall ({ps}) {self.body})"


Formula = Union[Atom, Equals, Not, And, ForAll]
Literal = Union[Atom, Not]


@dataclass(frozen=True)
class PredicateDecl:
    name: str
    params: tuple[TypedName, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    parameters: tuple[TypedName, ...] = ()
    precondition: Formula | None = None
    effect: tuple[Literal, ...] = ()

    @property
    def add_effects(self) -> tuple[Atom, ...]:
        return tuple(e for e in self.effect if isinstance(e, Atom))

    @property
    def del_effects(self) -> tuple[Atom, ...]:
        return tuple(e.arg for e in self.effect if isinstance(e, Not))


@dataclass(frozen=True)
class DomainAst:
    name: str
    requirements: tuple[str, ...] = ()
    # ordered (type, parent) pairs; ``object`` is implicit
    types: tuple[tuple[str, str], ...] = ()
    constants: tuple[TypedName, ...] = ()
    predicates: tuple[PredicateDecl, ...] = ()
    actions: tuple[ActionSchema, ...] = ()

    @property
    def type_parents(self) -> dict[str, str]:
        return dict(self.types)

    def predicate(self, name: str) -> PredicateDecl | None:
        for p in self.predicates:
            if p.name == name:
                return p
        return None

    def action(self, name: str) -> ActionSchema | None:
        for a in self.actions:
            if a.name == name:
                return a
        return None

    def has_type(self, name: str) -> bool:
        return name == ROOT_TYPE or name in self.type_parents

    def is_subtype(self, sub: str, sup: str) -> bool:
        """True when ``sub`` equals ``sup`` or descends from it."""
        parents = self.type_parents
        seen = set()
        t = sub
        while t not in seen:
            if t == sup:
                return True
            seen.add(t)
            if t == ROOT_TYPE:
                break
            t = parents.get(t, ROOT_TYPE)
        return sup == ROOT_TYPE


@dataclass(frozen=True)
class ProblemAst:
    name: str
    domain_name: str
    objects: tuple[TypedName, ...] = ()
    init: tuple[Atom, ...] = ()
    goal: Formula = field(default_factory=And)

    def object_names(self) -> tuple[str, ...]:
        return tuple(o.name for o in self.objects)


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return f"({self.name})"
        return f"({self.name} {' '.join(self.args)})"


@dataclass(frozen=True)
class Plan:
    steps: tuple[GroundAction, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[GroundAction]:
        return iter(self.steps)


def iter_atoms(formula: Formula | None) -> Iterator[tuple[Atom, bool]]:
    """Yield every atom in ``formula`` with its polarity (True = positive)."""
    if formula is None:
        return
    if isinstance(formula, Atom):
        yield formula, True
    elif isinstance(formula, Not):
        if isinstance(formula.arg, Atom):
            yield formula.arg, False
    elif isinstance(formula, And):
        for part in formula.parts:
            yield from iter_atoms(part)
    elif isinstance(formula, ForAll):
        yield from iter_atoms(formula.body)


def formula_symbols(formula: Formula | None) -> set[str]:
    """Constant (non-variable) symbols mentioned anywhere in ``formula``."""
    out: set[str] = set()

    def walk(f):
        if isinstance(f, Atom):
            out.update(a for a in f.args if not a.startswith("?"))
        elif isinstance(f, Equals):
            out.update(a for a in (f.left, f.right) if not a.startswith("?"))
        elif isinstance(f, Not):
            walk(f.arg)
        elif isinstance(f, And):
            for p in f.parts:
                walk(p)
        elif isinstance(f, ForAll):
            walk(f.body)

    walk(formula)
    return out


def conjuncts(formula: Formula | None) -> tuple[Formula, ...]:
    """Top-level conjuncts of a goal; a lone literal is its own conjunct."""
    if formula is None:
        return ()
    if isinstance(formula, And):
        out: list[Formula] = []
        for p in formula.parts:
            out.extend(conjuncts(p))
        return tuple(out)
    return (formula,)


def substitute(formula: Formula, mapping: dict[str, str]) -> Formula:
    """Rename symbols in ``formula`` according to ``mapping``."""
    if isinstance(formula, Atom):
        return Atom(formula.predicate, tuple(mapping.get(a, a) for a in formula.args))
    if isinstance(formula, Equals):
        return Equals(mapping.get(formula.left, formula.left), mapping.get(formula.right, formula.right))
    if isinstance(formula, Not):
        return Not(substitute(formula.arg, mapping))
    if isinstance(formula, And):
        return And(tuple(substitute(p, mapping) for p in formula.parts))
    if isinstance(formula, ForAll):
        inner = {k: v for k, v in mapping.items() if k not in {p.name for p in formula.params}}
        return ForAll(formula.params, substitute(formula.body, inner))
    raise TypeError(f"not a formula: {formula!r}")
