"""PDDL subset: syntax trees, reader and printer."""

from .ast import (
    ROOT_TYPE,
    ActionSchema,
    And,
    Atom,
    DomainAst,
    Equals,
    ForAll,
    Formula,
    GroundAction,
    Not,
    Plan,
    PredicateDecl,
    ProblemAst,
    TypedName,
    conjuncts,
    formula_symbols,
    iter_atoms,
    substitute,
)
from .errors import (
    ArityMismatch,
    DomainMismatch,
    PDDLError,
    PDDLSyntaxError,
    UnknownAction,
    UnknownObject,
    UnknownPredicate,
    UnknownType,
    UnsupportedFeature,
)
from .parser import parse_atom, parse_domain, parse_formula, parse_plan, parse_problem
from .render import render
from .semantics import ObjectUniverse, expand, holds

__all__ = [
    "ROOT_TYPE", "ActionSchema", "And", "Atom", "DomainAst", "Equals", "ForAll", "Formula",
    "GroundAction", "Not", "Plan", "PredicateDecl", "ProblemAst", "TypedName",
    "conjuncts", "formula_symbols", "iter_atoms", "substitute",
    "ArityMismatch", "DomainMismatch", "PDDLError", "PDDLSyntaxError", "UnknownAction",
    "UnknownObject", "UnknownPredicate", "UnknownType", "UnsupportedFeature",
    "parse_atom", "parse_domain", "parse_formula", "parse_plan", "parse_problem", "render",
    "ObjectUniverse", "expand", "holds",
]
