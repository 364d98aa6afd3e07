"""Symbolic grounding of plan arguments against a distilled scene."""

from __future__ import annotations

from dataclasses import dataclass, field

from .checker import FeedbackItem
from .pddl import DomainAst, Plan
from .scene import DistilledScene, label_of, lookup_object, lookup_room, normalize_symbol

AGENT_SYMBOL = "robot"
MAX_CANDIDATES = 3
MAX_EDIT_DISTANCE = 3


@dataclass(frozen=True)
class Unmatched:
    step: int
    position: int
    symbol: str


@dataclass(frozen=True)
class GroundingReport:
    ok: bool
    unmatched: tuple[Unmatched, ...] = ()
    matched: dict[str, str] = field(default_factory=dict)
    warnings: tuple[FeedbackItem, ...] = ()

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "unmatched": [{"step": u.step, "position": u.position, "symbol": u.symbol} for u in self.unmatched],
            "matched": dict(sorted(self.matched.items())),
            "warnings": [w.to_dict() for w in self.warnings],
        }


def check_ground(plan: Plan, scene: DistilledScene, domain: DomainAst | None = None) -> GroundingReport:
    """Classify every plan argument as a scene object, a room, or the agent.

    Steps are numbered from 1; argument positions from 0.
    """
    matched: dict[str, str] = {}
    unmatched: list[Unmatched] = []
    warnings: list[FeedbackItem] = []
    for s, step in enumerate(plan.steps, start=1):
        for pos, sym in enumerate(step.args):
            if normalize_symbol(sym) == AGENT_SYMBOL:
                matched[sym] = AGENT_SYMBOL
                continue
            entry = lookup_object(scene, sym)
            if entry is not None:
                matched[sym] = entry.object_id
                continue
            room, by_label = lookup_room(scene, sym)
            if room is not None:
                if by_label and sym not in matched:
                    warnings.append(FeedbackItem(
                        "grounding", "warning",
                        f"symbol '{sym}' matched room '{room}' by its label only", f"step {s}",
                        "room-label-fallback", {"symbol": sym, "room": room},
                    ))
                matched[sym] = room
                continue
            unmatched.append(Unmatched(s, pos, sym))
    return GroundingReport(not unmatched, tuple(unmatched), matched, tuple(warnings))


def edit_distance(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def candidates(symbol: str, scene: DistilledScene, limit: int = MAX_CANDIDATES) -> list[str]:
    """Nearest scene ids: edit distance <= 3 or same category label."""
    key = normalize_symbol(symbol)
    lbl = label_of(symbol)
    scored = []
    for sid in [e.object_id for e in scene.entries] + list(scene.room_ids):
        nid = normalize_symbol(sid)
        d = edit_distance(key, nid)
        if d <= MAX_EDIT_DISTANCE or label_of(sid) == lbl:
            scored.append((d, sid))
    scored.sort()
    return [sid for _, sid in scored[:limit]]


def validate_ground(plan: Plan, scene: DistilledScene, report: GroundingReport) -> list[FeedbackItem]:
    items = []
    for u in report.unmatched:
        step = plan.steps[u.step - 1]
        cands = candidates(u.symbol, scene)
        hint = f"; candidates: {', '.join(cands)}" if cands else "; no similar symbol in the scene"
        items.append(FeedbackItem(
            "grounding", "error",
            f"symbol '{u.symbol}' not found in scene (step {u.step} {step}, argument {u.position + 1}){hint}",
            f"step {u.step}", "unmatched-symbol",
            {"symbol": u.symbol, "step": u.step, "position": u.position, "candidates": cands},
        ))
    return items
