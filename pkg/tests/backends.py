"""Test doubles for the semantic backend."""

from relaxplan.pddl import parse_domain, parse_problem
from relaxplan.semantic import NoProgress, SemanticBackend, SemanticError, Verdict

LOCK_DOMAIN = """(define (domain lock)
  (:predicates (open ?d) (has-key ?k))
  (:action unlock :parameters (?d ?k) :precondition (has-key ?k) :effect (open ?d)))"""


class Stubborn(SemanticBackend):
    """Every refinement changes the problem, but no key is ever available."""

    name = "stubborn"

    def __init__(self, fail: set[str] = frozenset()):
        self.fail = set(fail)
        self.counter = 0

    def _maybe_fail(self, op):
        if op in self.fail:
            raise SemanticError(f"{op} is broken")

    def _problem(self, domain):
        self.counter += 1
        keys = " ".join(f"key_{j}" for j in range(self.counter))
        return parse_problem(f"(define (problem p) (:domain lock) (:objects door {keys}) (:init) "
                             "(:goal (open door)))", domain)

    def gen_domain(self, goal, scene, desc):
        self._maybe_fail("gen_domain")
        return parse_domain(LOCK_DOMAIN)

    def gen_problem(self, domain, goal, scene):
        self._maybe_fail("gen_problem")
        return self._problem(domain)

    def refine(self, problem, domain, goal, scene, feedback):
        self._maybe_fail("refine")
        return self._problem(domain)

    def shift_goal(self, goal, scene):
        self._maybe_fail("shift_goal")
        return goal.shifted()

    def relax_goal(self, goal, scene):
        self._maybe_fail("relax_goal")
        return goal.relaxed()

    def possibility_check(self, goal, scene):
        return Verdict(True, "looks fine")


class Stuck(Stubborn):
    name = "stuck"

    def refine(self, problem, domain, goal, scene, feedback):
        raise NoProgress("same problem")


class Recording(SemanticBackend):
    """Wraps a backend and logs each call with the goal it was given and returned."""

    def __init__(self, inner):
        self.inner = inner
        self.name = inner.name
        self.model = inner.model
        self.calls = []
        self.goals_out = []

    def _log(self, op, goal, fn):
        self.calls.append((op, goal))
        out = fn()
        if op in ("shift_goal", "relax_goal"):
            self.goals_out.append((op, goal, out))
        return out

    def gen_domain(self, goal, scene, desc):
        return self._log("gen_domain", goal, lambda: self.inner.gen_domain(goal, scene, desc))

    def gen_problem(self, domain, goal, scene):
        return self._log("gen_problem", goal, lambda: self.inner.gen_problem(domain, goal, scene))

    def refine(self, problem, domain, goal, scene, feedback):
        return self._log("refine", goal, lambda: self.inner.refine(problem, domain, goal, scene, feedback))

    def shift_goal(self, goal, scene):
        return self._log("shift_goal", goal, lambda: self.inner.shift_goal(goal, scene))

    def relax_goal(self, goal, scene):
        return self._log("relax_goal", goal, lambda: self.inner.relax_goal(goal, scene))

    def possibility_check(self, goal, scene):
        return self._log("possibility", goal, lambda: self.inner.possibility_check(goal, scene))
