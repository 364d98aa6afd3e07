"""Deterministic PDDL printer; ``parse(render(x)) == x`` for every tree."""

from __future__ import annotations

from functools import singledispatch

from .ast import And, DomainAst, Formula, Plan, ProblemAst, TypedName

INDENT = "  "


def _typed(items: tuple[TypedName, ...]) -> str:
    return " ".join(str(t) for t in items)


def _formula(f: Formula, depth: int) -> str:
    if isinstance(f, And) and len(f.parts) > 1:
        pad = INDENT * (depth + 1)
        inner = "\n".join(pad + _formula(p, depth + 1) for p in f.parts)
        return f"(and\n{inner})"
    return str(f)


@singledispatch
def render(ast) -> str:
    raise TypeError(f"cannot render {type(ast).__name__}")


@render.register
def _(ast: DomainAst) -> str:
    out = [f"(define (domain {ast.name})"]
    if ast.requirements:
        out.append(f"{INDENT}(:requirements {' '.join(ast.requirements)})")
    if ast.types:
        out.append(f"{INDENT}(:types")
        out.extend(f"{INDENT * 2}{t} - {p}" for t, p in ast.types)
        out[-1] += ")"
    if ast.constants:
        out.append(f"{INDENT}(:constants {_typed(ast.constants)})")
    if ast.predicates:
        out.append(f"{INDENT}(:predicates")
        for p in ast.predicates:
            params = (" " + _typed(p.params)) if p.params else ""
            out.append(f"{INDENT * 2}({p.name}{params})")
        out[-1] += ")"
    for a in ast.actions:
        out.append(f"{INDENT}(:action {a.name}")
        out.append(f"{INDENT * 2}:parameters ({_typed(a.parameters)})")
        if a.precondition is not None:
            out.append(f"{INDENT * 2}:precondition {_formula(a.precondition, 2)}")
        out.append(f"{INDENT * 2}:effect {_formula(And(a.effect), 2)})")
    out[-1] += ")"
    return "\n".join(out) + "\n"


@render.register
def _(ast: ProblemAst) -> str:
    out = [f"(define (problem {ast.name})", f"{INDENT}(:domain {ast.domain_name})"]
    out.append(f"{INDENT}(:objects")
    out.extend(f"{INDENT * 2}{o}" for o in ast.objects)
    out[-1] += ")"
    out.append(f"{INDENT}(:init")
    out.extend(f"{INDENT * 2}{a}" for a in ast.init)
    out[-1] += ")"
    out.append(f"{INDENT}(:goal {_formula(ast.goal, 1)}))")
    return "\n".join(out) + "\n"


@render.register
def _(ast: Plan) -> str:
    return "".join(f"{step}\n" for step in ast.steps)
