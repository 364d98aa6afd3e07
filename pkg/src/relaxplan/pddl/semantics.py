"""Ground evaluation of formulas over a typed object universe.

Quantifiers are expanded over every object of the quantified type (including
subtypes). Equality is resolved syntactically on ground symbols.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .ast import And, Atom, DomainAst, Equals, ForAll, Formula, Not, ProblemAst


class ObjectUniverse:
    """Objects and constants of a problem, indexed by (super)type."""

    def __init__(self, domain: DomainAst, problem: ProblemAst | None = None):
        self.domain = domain
        self.type_of: dict[str, str] = {}
        for c in domain.constants:
            self.type_of.setdefault(c.name, c.type)
        if problem is not None:
            for o in problem.objects:
                self.type_of.setdefault(o.name, o.type)
        self._cache: dict[str, tuple[str, ...]] = {}

    def of_type(self, type_name: str) -> tuple[str, ...]:
        if type_name not in self._cache:
            self._cache[type_name] = tuple(
                name for name, t in self.type_of.items() if self.domain.is_subtype(t, type_name)
            )
        return self._cache[type_name]

    def __contains__(self, name: str) -> bool:
        return name in self.type_of


def _bind(term: str, binding: Mapping[str, str]) -> str:
    return binding.get(term, term) if term.startswith("?") else term


def ground_atom(atom: Atom, binding: Mapping[str, str]) -> Atom:
    return Atom(atom.predicate, tuple(_bind(a, binding) for a in atom.args))


def _bindings(params, universe: ObjectUniverse, binding: Mapping[str, str]):
    combos = [dict(binding)]
    for p in params:
        combos = [{**c, p.name: o} for c in combos for o in universe.of_type(p.type)]
    return combos


def expand(formula: Formula | None, universe: ObjectUniverse,
           binding: Mapping[str, str] | None = None) -> list[Atom | Not] | None:
    """Flatten ``formula`` into ground literals.

    Returns ``None`` when an equality literal makes the formula false
    regardless of state. Satisfied equality literals are dropped.
    """
    binding = binding or {}
    out: list[Atom | Not] = []

    def walk(f, b) -> bool:
        if f is None:
            return True
        if isinstance(f, Atom):
            out.append(ground_atom(f, b))
            return True
        if isinstance(f, Equals):
            return _bind(f.left, b) == _bind(f.right, b)
        if isinstance(f, Not):
            if isinstance(f.arg, Equals):
                return _bind(f.arg.left, b) != _bind(f.arg.right, b)
            out.append(Not(ground_atom(f.arg, b)))
            return True
        if isinstance(f, And):
            return all(walk(p, b) for p in f.parts)
        if isinstance(f, ForAll):
            return all(walk(f.body, nb) for nb in _bindings(f.params, universe, b))
        raise TypeError(f"not a formula: {f!r}")

    if not walk(formula, binding):
        return None
    return out


def first_unsatisfied(formula: Formula | None, state: Iterable[Atom], universe: ObjectUniverse,
                      binding: Mapping[str, str] | None = None) -> Formula | None:
    """The first ground literal of ``formula`` that is false in ``state``."""
    state = state if isinstance(state, (set, frozenset)) else set(state)
    binding = binding or {}

    def walk(f, b):
        if f is None:
            return None
        if isinstance(f, Atom):
            g = ground_atom(f, b)
            return None if g in state else g
        if isinstance(f, Equals):
            l, r = _bind(f.left, b), _bind(f.right, b)
            return None if l == r else Equals(l, r)
        if isinstance(f, Not):
            if isinstance(f.arg, Equals):
                l, r = _bind(f.arg.left, b), _bind(f.arg.right, b)
                return None if l != r else Not(Equals(l, r))
            g = ground_atom(f.arg, b)
            return None if g not in state else Not(g)
        if isinstance(f, And):
            for p in f.parts:
                bad = walk(p, b)
                if bad is not None:
                    return bad
            return None
        if isinstance(f, ForAll):
            for nb in _bindings(f.params, universe, b):
                bad = walk(f.body, nb)
                if bad is not None:
                    return bad
            return None
        raise TypeError(f"not a formula: {f!r}")

    return walk(formula, binding)


def holds(formula: Formula | None, state: Iterable[Atom], universe: ObjectUniverse,
          binding: Mapping[str, str] | None = None) -> bool:
    return first_unsatisfied(formula, state, universe, binding) is None
