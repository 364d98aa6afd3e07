"""Reader for domains, problems and plans in the supported PDDL subset."""

from __future__ import annotations

import re

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
    Literal,
    Not,
    Plan,
    PredicateDecl,
    ProblemAst,
    TypedName,
)
from .errors import (
    ArityMismatch,
    DomainMismatch,
    PDDLSyntaxError,
    UnknownAction,
    UnknownObject,
    UnknownPredicate,
    UnknownType,
    UnsupportedFeature,
)

SUPPORTED_REQUIREMENTS = frozenset(
    {":strips", ":typing", ":negative-preconditions", ":universal-preconditions", ":equality"}
)
UNSUPPORTED_FORMULA_HEADS = {
    "or": "disjunction",
    "imply": "implication",
    "exists": "existential quantification",
    "when": "conditional effects",
    "increase": "numeric fluents",
    "decrease": "numeric fluents",
    "assign": "numeric fluents",
    "scale-up": "numeric fluents",
    "scale-down": "numeric fluents",
    "either": "either types",
    "<": "numeric fluents",
    ">": "numeric fluents",
    "<=": "numeric fluents",
    ">=": "numeric fluents",
}
UNSUPPORTED_SECTIONS = {
    ":functions": "numeric fluents",
    ":durative-action": "durative actions",
    ":derived": "derived predicates",
    ":constraints": "constraints",
    ":metric": "plan metrics",
    ":timed-initial-literals": "timed initial literals",
}

_TOKEN_RE = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


class Sym(str):
    """A token that remembers where it came from."""

    line: int
    col: int

    def __new__(cls, text: str, line: int, col: int):
        obj = super().__new__(cls, text)
        obj.line = line
        obj.col = col
        return obj


class SList(list):
    def __init__(self, line: int, col: int):
        super().__init__()
        self.line = line
        self.col = col


def read_sexprs(text: str) -> list:
    """Split ``text`` into a list of top-level s-expressions."""
    stack: list[SList] = []
    top: list = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        tok = m.group(0)
        col = pos - line_start + 1
        if tok == "(":
            stack.append(SList(line, col))
        elif tok == ")":
            if not stack:
                raise PDDLSyntaxError(line, col, "no closing parenthesis here")
            node = stack.pop()
            (stack[-1] if stack else top).append(node)
        elif not tok[0].isspace() and tok[0] != ";":
            (stack[-1] if stack else top).append(Sym(tok.lower(), line, col))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rfind("\n") + 1
        pos = m.end()
    if stack:
        open_ = stack[-1]
        raise PDDLSyntaxError(line, pos - line_start + 1, f"')' closing '(' opened at line {open_.line}")
    return top


def _loc(node) -> tuple[int, int]:
    return getattr(node, "line", 0), getattr(node, "col", 0)


def _expect_list(node, what: str) -> SList:
    if not isinstance(node, SList):
        raise PDDLSyntaxError(*_loc(node), what)
    return node


def _expect_sym(node, what: str) -> Sym:
    if not isinstance(node, Sym):
        raise PDDLSyntaxError(*_loc(node), what)
    return node


def _typed_list(items, *, variables: bool, what: str) -> list[TypedName]:
    """Parse ``a b - t c`` into typed names (untyped names default to object)."""
    out: list[TypedName] = []
    pending: list[Sym] = []
    i = 0
    while i < len(items):
        tok = items[i]
        if isinstance(tok, SList):
            if tok and isinstance(tok[0], Sym) and tok[0] == "either":
                raise UnsupportedFeature("either types", tok.line)
            raise PDDLSyntaxError(tok.line, tok.col, what)
        if tok == "-":
            if not pending or i + 1 >= len(items):
                raise PDDLSyntaxError(tok.line, tok.col, f"{what} before '-'")
            t = items[i + 1]
            if isinstance(t, SList):
                if t and t[0] == "either":
                    raise UnsupportedFeature("either types", t.line)
                raise PDDLSyntaxError(t.line, t.col, "type name")
            out.extend(TypedName(p, str(t)) for p in pending)
            pending = []
            i += 2
            continue
        if variables and not tok.startswith("?"):
            raise PDDLSyntaxError(tok.line, tok.col, "variable starting with '?'")
        pending.append(tok)
        i += 1
    out.extend(TypedName(p, ROOT_TYPE) for p in pending)
    return out


def _parse_atom(node: SList) -> Atom:
    head = _expect_sym(node[0] if node else node, "predicate name")
    args = []
    for a in node[1:]:
        args.append(str(_expect_sym(a, "term")))
    return Atom(str(head), tuple(args))


def _parse_formula(node, *, allow_forall: bool = True) -> Formula:
    node = _expect_list(node, "formula")
    if not node:
        raise PDDLSyntaxError(node.line, node.col, "non-empty formula")
    head = node[0]
    if isinstance(head, SList):
        raise PDDLSyntaxError(head.line, head.col, "formula head")
    if head in UNSUPPORTED_FORMULA_HEADS:
        raise UnsupportedFeature(UNSUPPORTED_FORMULA_HEADS[head], head.line)
    if head == "and":
        return And(tuple(_parse_formula(p, allow_forall=allow_forall) for p in node[1:]))
    if head == "not":
        if len(node) != 2:
            raise PDDLSyntaxError(head.line, head.col, "exactly one argument to 'not'")
        inner = _parse_formula(node[1], allow_forall=allow_forall)
        if not isinstance(inner, (Atom, Equals)):
            raise UnsupportedFeature("negation of compound formulas", head.line)
        return Not(inner)
    if head == "=":
        if len(node) != 3:
            raise PDDLSyntaxError(head.line, head.col, "two terms for '='")
        return Equals(str(_expect_sym(node[1], "term")), str(_expect_sym(node[2], "term")))
    if head == "forall":
        if not allow_forall:
            raise UnsupportedFeature("quantified effects", head.line)
        if len(node) != 3:
            raise PDDLSyntaxError(head.line, head.col, "(forall (vars) body)")
        params = _typed_list(_expect_list(node[1], "variable list"), variables=True, what="variable")
        return ForAll(tuple(params), _parse_formula(node[2], allow_forall=True))
    return _parse_atom(node)


def _parse_effect(node) -> tuple[Literal, ...]:
    node = _expect_list(node, "effect")
    if not node:
        return ()
    head = node[0]
    if isinstance(head, Sym) and head == "and":
        out: list[Literal] = []
        for p in node[1:]:
            out.extend(_parse_effect(p))
        return tuple(out)
    if isinstance(head, Sym) and head == "forall":
        raise UnsupportedFeature("quantified effects", head.line)
    if isinstance(head, Sym) and head in UNSUPPORTED_FORMULA_HEADS:
        raise UnsupportedFeature(UNSUPPORTED_FORMULA_HEADS[head], head.line)
    if isinstance(head, Sym) and head == "not":
        if len(node) != 2:
            raise PDDLSyntaxError(head.line, head.col, "exactly one argument to 'not'")
        inner = _expect_list(node[1], "atom")
        if inner and inner[0] == "=":
            raise PDDLSyntaxError(inner.line, inner.col, "atom (equality is not an effect)")
        return (Not(_parse_atom(inner)),)
    if isinstance(head, Sym) and head == "=":
        raise PDDLSyntaxError(head.line, head.col, "atom (equality is not an effect)")
    return (_parse_atom(node),)


def _sections(root: SList, kind: str) -> tuple[str, list[SList]]:
    if len(root) < 2 or root[0] != "define":
        raise PDDLSyntaxError(*_loc(root), "(define ...)")
    header = _expect_list(root[1], f"({kind} NAME)")
    if len(header) != 2 or header[0] != kind:
        raise PDDLSyntaxError(header.line, header.col, f"({kind} NAME)")
    name = str(_expect_sym(header[1], f"{kind} name"))
    return name, [_expect_list(s, "section") for s in root[2:]]


def _single_root(text: str, kind: str) -> SList:
    forms = read_sexprs(text)
    lists = [f for f in forms if isinstance(f, SList)]
    if len(forms) != 1 or len(lists) != 1:
        if not forms:
            raise PDDLSyntaxError(1, 1, f"a {kind} definition")
        extra = forms[1] if len(forms) > 1 else forms[0]
        raise PDDLSyntaxError(*_loc(extra), f"a single {kind} definition")
    return lists[0]


# -- scope checks ----------------------------------------------------------


def _check_terms(formula, scope: dict[str, str], consts: set[str], predicates, line: int, domain: DomainAst | None = None):
    """Check free variables, predicate names and arities inside a formula."""
    if formula is None:
        return
    if isinstance(formula, Atom):
        decl = predicates.get(formula.predicate)
        if decl is None:
            raise UnknownPredicate(formula.predicate, line)
        if decl.arity != len(formula.args):
            raise ArityMismatch(formula.predicate, len(formula.args), decl.arity, line)
        for a in formula.args:
            _check_term(a, scope, consts, line)
    elif isinstance(formula, Equals):
        _check_term(formula.left, scope, consts, line)
        _check_term(formula.right, scope, consts, line)
    elif isinstance(formula, Not):
        _check_terms(formula.arg, scope, consts, predicates, line, domain)
    elif isinstance(formula, And):
        for p in formula.parts:
            _check_terms(p, scope, consts, predicates, line, domain)
    elif isinstance(formula, ForAll):
        inner = dict(scope)
        for p in formula.params:
            if domain is not None and not domain.has_type(p.type):
                raise UnknownType(p.type, line)
            inner[p.name] = p.type
        _check_terms(formula.body, inner, consts, predicates, line, domain)


def _check_term(term: str, scope, consts, line: int):
    if term.startswith("?"):
        if term not in scope:
            raise PDDLSyntaxError(line, 0, f"variable {term} to be bound by a parameter or quantifier")
    elif term not in consts:
        raise UnknownObject(term, line)


# -- public readers --------------------------------------------------------


def parse_domain(text: str) -> DomainAst:
    """Read a domain, rejecting anything outside the supported subset."""
    root = _single_root(text, "domain")
    name, sections = _sections(root, "domain")
    requirements: list[str] = []
    types: dict[str, str] = {}
    constants: list[TypedName] = []
    predicates: list[PredicateDecl] = []
    actions: list[tuple[ActionSchema, int]] = []
    for sec in sections:
        key = _expect_sym(sec[0] if sec else sec, "section keyword")
        if key in UNSUPPORTED_SECTIONS:
            raise UnsupportedFeature(UNSUPPORTED_SECTIONS[key], key.line)
        if key == ":requirements":
            for r in sec[1:]:
                r = _expect_sym(r, "requirement flag")
                if r not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedFeature(str(r), r.line)
                requirements.append(str(r))
        elif key == ":types":
            for tn in _typed_list(sec[1:], variables=False, what="type name"):
                if tn.name == ROOT_TYPE:
                    continue
                if tn.name in types and types[tn.name] != tn.type:
                    raise PDDLSyntaxError(key.line, key.col, f"a single parent for type {tn.name}")
                types[tn.name] = tn.type
            # parents named only after '-' are implicitly declared
            for parent in list(types.values()):
                if parent != ROOT_TYPE and parent not in types:
                    types[parent] = ROOT_TYPE
        elif key == ":constants":
            constants.extend(_typed_list(sec[1:], variables=False, what="constant"))
        elif key == ":predicates":
            for p in sec[1:]:
                p = _expect_list(p, "predicate declaration")
                pname = _expect_sym(p[0] if p else p, "predicate name")
                params = _typed_list(p[1:], variables=True, what="parameter")
                if any(d.name == pname for d in predicates):
                    raise PDDLSyntaxError(pname.line, pname.col, f"unique predicate name (duplicate {pname})")
                predicates.append(PredicateDecl(str(pname), tuple(params)))
        elif key == ":action":
            actions.append((_parse_action(sec), sec.line))
        else:
            raise PDDLSyntaxError(key.line, key.col, "a domain section keyword")

    dom = DomainAst(name, tuple(requirements), tuple(types.items()), tuple(constants), tuple(predicates),
                    tuple(a for a, _ in actions))
    _check_domain(dom, actions)
    return dom


def _parse_action(sec: SList) -> ActionSchema:
    if len(sec) < 2:
        raise PDDLSyntaxError(sec.line, sec.col, "action name")
    name = _expect_sym(sec[1], "action name")
    params: list[TypedName] = []
    pre = None
    eff: tuple[Literal, ...] = ()
    i = 2
    while i < len(sec):
        key = _expect_sym(sec[i], ":parameters, :precondition or :effect")
        if i + 1 >= len(sec):
            raise PDDLSyntaxError(key.line, key.col, f"a value after {key}")
        val = sec[i + 1]
        if key == ":parameters":
            params = _typed_list(_expect_list(val, "parameter list"), variables=True, what="parameter")
        elif key == ":precondition":
            pre = _parse_formula(val)
        elif key == ":effect":
            eff = _parse_effect(val)
        else:
            raise PDDLSyntaxError(key.line, key.col, ":parameters, :precondition or :effect")
        i += 2
    return ActionSchema(str(name), tuple(params), pre, eff)


def _check_domain(dom: DomainAst, actions: list[tuple[ActionSchema, int]]) -> None:
    parents = dom.type_parents
    # cycle check
    for t in parents:
        seen = set()
        cur = t
        while cur != ROOT_TYPE:
            if cur in seen:
                raise PDDLSyntaxError(0, 0, f"acyclic type hierarchy (cycle through {t})")
            seen.add(cur)
            cur = parents.get(cur, ROOT_TYPE)
    for c in dom.constants:
        if not dom.has_type(c.type):
            raise UnknownType(c.type)
    for p in dom.predicates:
        for prm in p.params:
            if not dom.has_type(prm.type):
                raise UnknownType(prm.type)
    preds = {p.name: p for p in dom.predicates}
    consts = {c.name for c in dom.constants}
    seen_actions = set()
    for a, line in actions:
        if a.name in seen_actions:
            raise PDDLSyntaxError(line, 0, f"unique action name (duplicate {a.name})")
        seen_actions.add(a.name)
        scope = {}
        for prm in a.parameters:
            if not dom.has_type(prm.type):
                raise UnknownType(prm.type, line)
            if prm.name in scope:
                raise PDDLSyntaxError(line, 0, f"unique parameter names in {a.name}")
            scope[prm.name] = prm.type
        _check_terms(a.precondition, scope, consts, preds, line, dom)
        for e in a.effect:
            _check_terms(e, scope, consts, preds, line, dom)


def parse_problem(text: str, domain: DomainAst, *, strict: bool = True) -> ProblemAst:
    """Read a problem against ``domain``.

    With ``strict=False`` only the syntax is checked; references are left for
    the instantiation checker to report as feedback instead of raising.
    """
    root = _single_root(text, "problem")
    name, sections = _sections(root, "problem")
    domain_name = None
    objects: list[TypedName] = []
    init: list[Atom] = []
    goal: Formula | None = None
    init_lines: list[int] = []
    goal_line = 0
    for sec in sections:
        key = _expect_sym(sec[0] if sec else sec, "section keyword")
        if key in UNSUPPORTED_SECTIONS:
            raise UnsupportedFeature(UNSUPPORTED_SECTIONS[key], key.line)
        if key == ":domain":
            if len(sec) != 2:
                raise PDDLSyntaxError(key.line, key.col, "(:domain NAME)")
            domain_name = str(_expect_sym(sec[1], "domain name"))
        elif key == ":requirements":
            for r in sec[1:]:
                r = _expect_sym(r, "requirement flag")
                if r not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedFeature(str(r), r.line)
        elif key == ":objects":
            objects.extend(_typed_list(sec[1:], variables=False, what="object name"))
        elif key == ":init":
            for lit in sec[1:]:
                lit = _expect_list(lit, "ground atom")
                if lit and isinstance(lit[0], Sym) and lit[0] in ("not", "=", "and", "forall"):
                    raise PDDLSyntaxError(lit.line, lit.col, "positive ground atom in :init")
                if lit and isinstance(lit[0], Sym) and lit[0] in UNSUPPORTED_FORMULA_HEADS:
                    raise UnsupportedFeature(UNSUPPORTED_FORMULA_HEADS[lit[0]], lit.line)
                atom = _parse_atom(lit)
                if any(a.startswith("?") for a in atom.args):
                    raise PDDLSyntaxError(lit.line, lit.col, "ground atom in :init")
                init.append(atom)
                init_lines.append(lit.line)
        elif key == ":goal":
            if len(sec) != 2:
                raise PDDLSyntaxError(key.line, key.col, "a single goal formula")
            goal = _parse_formula(sec[1])
            goal_line = key.line
        else:
            raise PDDLSyntaxError(key.line, key.col, "a problem section keyword")
    if domain_name is None:
        raise PDDLSyntaxError(root.line, root.col, "(:domain NAME) section")
    if goal is None:
        raise PDDLSyntaxError(root.line, root.col, "(:goal ...) section")
    prob = ProblemAst(name, domain_name, tuple(objects), tuple(init), goal)
    if strict:
        _check_problem(prob, domain, init_lines, goal_line)
    return prob


def _check_problem(prob: ProblemAst, domain: DomainAst, init_lines: list[int], goal_line: int) -> None:
    if prob.domain_name != domain.name:
        raise DomainMismatch(prob.domain_name, domain.name)
    names = set()
    for o in prob.objects:
        if o.name in names:
            raise PDDLSyntaxError(0, 0, f"unique object names (duplicate {o.name})")
        names.add(o.name)
        if not domain.has_type(o.type):
            raise UnknownType(o.type)
    consts = names | {c.name for c in domain.constants}
    preds = {p.name: p for p in domain.predicates}
    for atom, line in zip(prob.init, init_lines):
        _check_terms(atom, {}, consts, preds, line, domain)
    _check_terms(prob.goal, {}, consts, preds, goal_line, domain)


def parse_plan(text: str, domain: DomainAst) -> Plan:
    """Read a plan: one ``(action arg ...)`` per step; ``;`` starts a comment."""
    steps: list[GroundAction] = []
    for form in read_sexprs(text):
        if isinstance(form, Sym):
            # tolerate IPC-style "0:" step prefixes
            if form.endswith(":") and form[:-1].replace(".", "").isdigit():
                continue
            raise PDDLSyntaxError(form.line, form.col, "(action args...)")
        if not form:
            raise PDDLSyntaxError(form.line, form.col, "action name")
        head = _expect_sym(form[0], "action name")
        args = tuple(str(_expect_sym(a, "object name")) for a in form[1:])
        schema = domain.action(str(head))
        if schema is None:
            raise UnknownAction(str(head), head.line)
        if len(schema.parameters) != len(args):
            raise ArityMismatch(str(head), len(args), len(schema.parameters), head.line)
        steps.append(GroundAction(str(head), args))
    return Plan(tuple(steps))


def parse_formula(text: str) -> Formula:
    """Read a standalone formula such as a goal template (no scope checks)."""
    forms = read_sexprs(text)
    if len(forms) != 1:
        raise PDDLSyntaxError(1, 1, "exactly one formula")
    return _parse_formula(forms[0])


def parse_atom(text: str) -> Atom:
    forms = read_sexprs(text)
    if len(forms) != 1 or not isinstance(forms[0], SList):
        raise PDDLSyntaxError(1, 1, "exactly one atom")
    return _parse_atom(forms[0])
