"""Grounding of a lifted domain/problem pair into a propositional task.

Facts are indexed integers and states are Python ints used as bitsets, so
applicability is two mask tests and successor generation is two bit ops.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..pddl import And, Atom, DomainAst, Not, ProblemAst
from ..pddl.semantics import ObjectUniverse, expand

DEFAULT_GROUNDING_CAP = 5_000_000


class GroundingExplosion(Exception):
    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"more than {cap} ground actions (reached {count})")


@dataclass(frozen=True)
class GroundOp:
    name: str
    args: tuple[str, ...]
    pre: int
    neg: int
    add: int
    delete: int
    pre_facts: tuple[int, ...]
    add_facts: tuple[int, ...]

    def applicable(self, state: int) -> bool:
        return state & self.pre == self.pre and not state & self.neg

    def apply(self, state: int) -> int:
        return (state & ~self.delete) | self.add

    def __str__(self) -> str:
        return f"({' '.join((self.name,) + self.args)})"


@dataclass(frozen=True)
class GroundTask:
    facts: tuple[Atom, ...]
    actions: tuple[GroundOp, ...]
    init: int
    goal_pos: int
    goal_neg: int
    goal_facts: tuple[int, ...]
    # False when the goal contains an equality literal that can never hold
    goal_possible: bool = True

    def is_goal(self, state: int) -> bool:
        return self.goal_possible and state & self.goal_pos == self.goal_pos and not state & self.goal_neg

    def decode(self, state: int) -> frozenset[Atom]:
        out = []
        i = 0
        while state:
            if state & 1:
                out.append(self.facts[i])
            state >>= 1
            i += 1
        return frozenset(out)

    def encode(self, atoms) -> int:
        index = {f: i for i, f in enumerate(self.facts)}
        s = 0
        for a in atoms:
            s |= 1 << index[a]
        return s


class _FactIndex:
    def __init__(self):
        self.index: dict[Atom, int] = {}
        self.facts: list[Atom] = []

    def __call__(self, atom: Atom) -> int:
        i = self.index.get(atom)
        if i is None:
            i = len(self.facts)
            self.index[atom] = i
            self.facts.append(atom)
        return i


def _masks(literals, idx: _FactIndex) -> tuple[int, int, list[int]]:
    pos = neg = 0
    pos_list = []
    for lit in literals:
        if isinstance(lit, Not):
            neg |= 1 << idx(lit.arg)
        else:
            bit = idx(lit)
            if not pos & (1 << bit):
                pos_list.append(bit)
            pos |= 1 << bit
    return pos, neg, pos_list


def ground(domain: DomainAst, problem: ProblemAst, *, cap: int = DEFAULT_GROUNDING_CAP) -> GroundTask:
    """Instantiate every type-consistent binding of every action schema.

    Bindings whose equality constraints can never hold are discarded; all
    others are kept even if their preconditions are unreachable.
    """
    universe = ObjectUniverse(domain, problem)
    idx = _FactIndex()
    init = 0
    for a in problem.init:
        init |= 1 << idx(a)

    ops: list[GroundOp] = []
    count = 0
    for schema in domain.actions:
        domains = [universe.of_type(p.type) for p in schema.parameters]
        for combo in itertools.product(*domains):
            count += 1
            if count > cap:
                raise GroundingExplosion(count, cap)
            binding = {p.name: o for p, o in zip(schema.parameters, combo)}
            pre_lits = expand(schema.precondition, universe, binding)
            if pre_lits is None:
                continue
            pre, neg, pre_list = _masks(pre_lits, idx)
            add_lits = expand(_conj(schema.add_effects), universe, binding)
            del_lits = expand(_conj(schema.del_effects), universe, binding)
            add = delete = 0
            add_list = []
            for a in add_lits:
                bit = idx(a)
                if not add & (1 << bit):
                    add_list.append(bit)
                add |= 1 << bit
            for a in del_lits:
                delete |= 1 << idx(a)
            ops.append(GroundOp(schema.name, combo, pre, neg, add, delete, tuple(pre_list), tuple(add_list)))

    goal_lits = expand(problem.goal, universe)
    if goal_lits is None:
        return GroundTask(tuple(idx.facts), tuple(ops), init, 0, 0, (), goal_possible=False)
    gpos, gneg, glist = _masks(goal_lits, idx)
    return GroundTask(tuple(idx.facts), tuple(ops), init, gpos, gneg, tuple(glist))


def _conj(atoms) -> And:
    return And(tuple(atoms))
