"""3D scene graph loading, distillation and item scattering.

Scene files are JSON documents::

    {
      "scene_id": "allensville",
      "rooms":   [{"id": "kitchen", "label": "kitchen"}, ...],
      "objects": [{"id": "mop_1", "label": "mop", "description": "a wet mop",
                   "room_id": "kitchen", "attributes": {...},
                   "position": [1.2, 0.3, 0.0]}, ...],
      "edges":   [["kitchen", "mop_1", "in-room"], ...]
    }

``attributes``, ``position``, ``render_data`` and ``edges`` are optional.
An object without an explicit ``in-room`` edge gets one from its ``room_id``.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Sequence

RELATIONS = frozenset({"in-room", "on", "inside"})
MAX_DESCRIPTION = 256


class SceneError(Exception):
    pass


class MalformedScene(SceneError):
    def __init__(self, offset: int, reason: str):
        self.offset = offset
        self.reason = reason
        super().__init__(f"offset {offset}: {reason}")


class DanglingReference(SceneError):
    def __init__(self, ref: str):
        self.ref = ref
        super().__init__(f"reference to unknown id {ref!r}")


class IdCollision(SceneError):
    def __init__(self, ref: str):
        self.ref = ref
        super().__init__(f"id {ref!r} already present in scene")


_SEP_RE = re.compile(r"[\s\-]+")


def normalize_symbol(symbol: str) -> str:
    """Lowercase, trim, and fold runs of whitespace/hyphens into ``_``."""
    return _SEP_RE.sub("_", symbol.strip().lower())


def label_of(symbol: str) -> str:
    """Category part of an instance id: ``dining_table_2`` -> ``dining_table``."""
    return re.sub(r"_\d+$", "", normalize_symbol(symbol))


@dataclass(frozen=True)
class RoomNode:
    id: str
    label: str


@dataclass(frozen=True)
class ObjectNode:
    id: str
    label: str
    description: str = ""
    room_id: str = ""
    attributes: Mapping[str, str] = field(default_factory=dict)
    position: tuple[float, float, float] | None = None
    render_data: Any = None


@dataclass(frozen=True)
class SceneGraph:
    scene_id: str
    rooms: tuple[RoomNode, ...] = ()
    objects: tuple[ObjectNode, ...] = ()
    edges: tuple[tuple[str, str, str], ...] = ()

    def room_ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.rooms)

    def object(self, object_id: str) -> ObjectNode | None:
        for o in self.objects:
            if o.id == object_id:
                return o
        return None


@dataclass(frozen=True)
class SceneEntry:
    object_id: str
    room_id: str
    description: str


@dataclass(frozen=True)
class DistilledScene:
    scene_id: str
    entries: tuple[SceneEntry, ...] = ()
    room_ids: tuple[str, ...] = ()
    # room id -> free-text label, used for label fallback during grounding
    room_labels: tuple[tuple[str, str], ...] = ()

    def to_dict(self) -> dict:
        return {
            "scene_id": self.scene_id,
            "rooms": [{"id": r, "label": l} for r, l in self.room_labels] or [{"id": r} for r in self.room_ids],
            "objects": [{"id": e.object_id, "room": e.room_id, "description": e.description}
                        for e in self.entries],
        }

    def to_text(self) -> str:
        """Compact serialization for prompts and size comparisons."""
        return json.dumps(self.to_dict(), separators=(",", ":"), sort_keys=True)


def _offset_of(text: str, needle: str, nth: int = 1) -> int:
    pos = -1
    for _ in range(nth):
        pos = text.find(needle, pos + 1)
        if pos < 0:
            return 0
    return pos


def parse_scene(data: bytes | str) -> SceneGraph:
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedScene(e.pos, e.msg) from None
    if not isinstance(doc, dict):
        raise MalformedScene(0, "top level must be an object")
    for key in ("scene_id", "rooms", "objects"):
        if key not in doc:
            raise MalformedScene(0, f"missing field {key!r}")

    seen: set[str] = set()
    raw_seen: dict[str, int] = {}

    def claim(raw_id, kind):
        if not isinstance(raw_id, str) or not raw_id.strip():
            raise MalformedScene(_offset_of(text, f'"{kind}"'), f"{kind} id must be a non-empty string")
        raw_seen[raw_id] = raw_seen.get(raw_id, 0) + 1
        norm = normalize_symbol(raw_id)
        if norm in seen:
            # offset of this very occurrence of the raw spelling
            raise MalformedScene(_offset_of(text, f'"{raw_id}"', raw_seen[raw_id]), "duplicate id")
        seen.add(norm)

    rooms = []
    for r in doc["rooms"]:
        claim(r.get("id"), "rooms")
        rooms.append(RoomNode(r["id"], str(r.get("label", r["id"]))))
    room_ids = {r.id for r in rooms}

    objects = []
    for o in doc["objects"]:
        claim(o.get("id"), "objects")
        room = o.get("room_id")
        if room not in room_ids:
            raise DanglingReference(str(room))
        pos = o.get("position")
        if pos is not None:
            if not (isinstance(pos, list) and len(pos) == 3):
                raise MalformedScene(_offset_of(text, f'"{o["id"]}"'), "position must have 3 coordinates")
            pos = tuple(float(v) for v in pos)
        objects.append(ObjectNode(
            id=o["id"],
            label=str(o.get("label", label_of(o["id"]))),
            description=str(o.get("description", "")),
            room_id=room,
            attributes={str(k): str(v) for k, v in (o.get("attributes") or {}).items()},
            position=pos,
            render_data=o.get("render_data"),
        ))
    all_ids = room_ids | {o.id for o in objects}

    edges = []
    for e in doc.get("edges", []):
        if not (isinstance(e, list) and len(e) == 3):
            raise MalformedScene(_offset_of(text, '"edges"'), "edge must be [parent, child, relation]")
        parent, child, rel = e
        if rel not in RELATIONS:
            raise MalformedScene(_offset_of(text, f'"{rel}"'), f"unknown relation {rel!r}")
        for ref in (parent, child):
            if ref not in all_ids:
                raise DanglingReference(str(ref))
        edges.append((parent, child, rel))
    for o in objects:
        room_edges = [p for p, c, r in edges if c == o.id and r == "in-room"]
        if not room_edges:
            edges.append((o.room_id, o.id, "in-room"))
        elif any(p != o.room_id for p in room_edges):
            raise MalformedScene(_offset_of(text, f'"{o.id}"'), f"in-room edge disagrees with room_id of {o.id}")
    return SceneGraph(str(doc["scene_id"]), tuple(rooms), tuple(objects), tuple(edges))


def scene_to_dict(scene: SceneGraph) -> dict:
    objs = []
    for o in scene.objects:
        d: dict[str, Any] = {"id": o.id, "label": o.label, "description": o.description, "room_id": o.room_id}
        if o.attributes:
            d["attributes"] = dict(o.attributes)
        if o.position is not None:
            d["position"] = list(o.position)
        if o.render_data is not None:
            d["render_data"] = o.render_data
        objs.append(d)
    return {
        "scene_id": scene.scene_id,
        "rooms": [{"id": r.id, "label": r.label} for r in scene.rooms],
        "objects": objs,
        "edges": [list(e) for e in scene.edges],
    }


def dump_scene(scene: SceneGraph) -> str:
    return json.dumps(scene_to_dict(scene), indent=2) + "\n"


def distill(scene: SceneGraph) -> DistilledScene:
    """Keep only object locations and short descriptions."""
    entries = sorted(
        (SceneEntry(o.id, o.room_id, o.description[:MAX_DESCRIPTION]) for o in scene.objects),
        key=lambda e: e.object_id,
    )
    return DistilledScene(
        scene_id=scene.scene_id,
        entries=tuple(entries),
        room_ids=scene.room_ids(),
        room_labels=tuple((r.id, r.label) for r in scene.rooms),
    )


def scatter_items(scene: SceneGraph, items: Sequence[ObjectNode], seed: int) -> SceneGraph:
    """Place ``items`` in rooms drawn uniformly with a seeded generator.

    An item whose ``attributes`` carry ``inside: <container id>`` follows its
    container into the same room and gets an ``inside`` edge.
    """
    if not scene.rooms:
        raise SceneError("scene has no rooms to scatter into")
    taken = {normalize_symbol(i) for i in scene.room_ids()} | {normalize_symbol(o.id) for o in scene.objects}
    for item in items:
        key = normalize_symbol(item.id)
        if key in taken:
            raise IdCollision(item.id)
        taken.add(key)

    rng = random.Random(seed)
    rooms = scene.room_ids()
    placed: dict[str, str] = {o.id: o.room_id for o in scene.objects}
    new_objects = list(scene.objects)
    new_edges = list(scene.edges)
    # one draw per item, in input order, regardless of containment
    draws = [rooms[rng.randrange(len(rooms))] for _ in items]
    deferred = []
    for item, room in zip(items, draws):
        container = item.attributes.get("inside") if item.attributes else None
        if container:
            deferred.append(item)
            continue
        placed[item.id] = room
        new_objects.append(replace(item, room_id=room, position=None))
        new_edges.append((room, item.id, "in-room"))
    for item in deferred:
        container = item.attributes["inside"]
        if container not in placed:
            raise DanglingReference(container)
        room = placed[container]
        placed[item.id] = room
        new_objects.append(replace(item, room_id=room, position=None))
        new_edges.append((room, item.id, "in-room"))
        new_edges.append((container, item.id, "inside"))
    return replace(scene, objects=tuple(new_objects), edges=tuple(new_edges))


def lookup_object(scene: DistilledScene, symbol: str) -> SceneEntry | None:
    key = normalize_symbol(symbol)
    for e in scene.entries:
        if normalize_symbol(e.object_id) == key:
            return e
    return None


def lookup_room(scene: DistilledScene, symbol: str) -> tuple[str | None, bool]:
    """Resolve a room symbol; returns (room id, matched-by-label-only)."""
    key = normalize_symbol(symbol)
    for r in scene.room_ids:
        if normalize_symbol(r) == key:
            return r, False
    for r, lbl in scene.room_labels:
        if normalize_symbol(lbl) == key:
            return r, True
    return None, False


def item_from_dict(d: Mapping[str, Any]) -> ObjectNode:
    return ObjectNode(
        id=d["id"],
        label=d.get("label", label_of(d["id"])),
        description=d.get("description", ""),
        attributes={str(k): str(v) for k, v in (d.get("attributes") or {}).items()},
    )
