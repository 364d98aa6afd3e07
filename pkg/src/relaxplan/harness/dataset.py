"""Task dataset layout.

::

    <root>/scenes/<scene_id>.json
    <root>/<family_dir>/description.txt          natural-language domain description
    <root>/<family_dir>/<task_id>/task.meta      JSON: goal, scene, items, flags, script
    <root>/<family_dir>/<task_id>/domain.pddl    optional ground truth
    <root>/<family_dir>/<task_id>/problem.pddl   optional ground truth
    <root>/<family_dir>/<task_id>/plan.plan      optional ground truth
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from ..scene import ObjectNode, SceneGraph, item_from_dict, parse_scene

FAMILY_DIRS = {
    "dining_setup": "DiningSetup",
    "house_cleaning": "HouseCleaning",
    "pc_assembly": "PCAssembly",
    "laundry": "Laundry",
    "office_setup": "OfficeSetup",
}
GROUND_TRUTH_FILES = {"domain": "domain.pddl", "problem": "problem.pddl", "plan": "plan.plan"}
SCENES_DIR = "scenes"


class LayoutError(Exception):
    def __init__(self, path: Path | str, reason: str):
        self.path = Path(path)
        self.reason = reason
        super().__init__(f"{path}: {reason}")


class UnknownFamily(Exception):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown task family {name!r}; expected one of {', '.join(FAMILY_DIRS)}")


@dataclass(frozen=True)
class TaskSpec:
    id: str
    family: str
    scene_id: str
    goal_text: str
    domain_desc: str
    scene_path: Path
    ground_truth: dict[str, Path] = field(default_factory=dict)
    items: tuple[dict, ...] = ()
    designed_impossible: bool = False
    script: dict[str, Any] = field(default_factory=dict)

    def load_scene(self) -> SceneGraph:
        return parse_scene(self.scene_path.read_bytes())

    def scatter_nodes(self) -> list[ObjectNode]:
        return [item_from_dict(d) for d in self.items]


def bundled_mini() -> Path:
    return Path(str(resources.files("relaxplan").joinpath("data", "mini")))


def resolve_root(path: str | Path) -> Path:
    """A dataset path, falling back to the bundled copy for ``mini``."""
    p = Path(path)
    if p.is_dir():
        return p
    if p.name == "mini" or str(path).rstrip("/") == "mini":
        return bundled_mini()
    raise LayoutError(p, "dataset directory does not exist")


def _load_task(task_dir: Path, family: str, desc: str, root: Path) -> TaskSpec:
    meta_path = task_dir / "task.meta"
    if not meta_path.is_file():
        raise LayoutError(task_dir, "missing task.meta")
    try:
        meta = json.loads(meta_path.read_text())
    except json.JSONDecodeError as e:
        raise LayoutError(meta_path, f"task.meta is not valid JSON: {e}") from None
    for key in ("goal", "scene"):
        if not meta.get(key):
            raise LayoutError(meta_path, f"task.meta lacks {key!r}")
    scene_path = root / SCENES_DIR / f"{meta['scene']}.json"
    if not scene_path.is_file():
        raise LayoutError(scene_path, f"scene {meta['scene']!r} referenced by {task_dir.name} not found")
    items = tuple(meta.get("items") or ())
    for it in items:
        if not isinstance(it, dict) or not it.get("id"):
            raise LayoutError(meta_path, "every item needs an id")
    gt = {k: task_dir / f for k, f in GROUND_TRUTH_FILES.items() if (task_dir / f).is_file()}
    return TaskSpec(
        id=meta.get("id", task_dir.name),
        family=family,
        scene_id=meta["scene"],
        goal_text=meta["goal"],
        domain_desc=desc,
        scene_path=scene_path,
        ground_truth=gt,
        items=items,
        designed_impossible=bool(meta.get("designed_impossible", False)),
        script=dict(meta.get("script") or {}),
    )


def load_dataset(root: str | Path) -> list[TaskSpec]:
    root = Path(root)
    if not root.is_dir():
        raise LayoutError(root, "dataset directory does not exist")
    if not (root / SCENES_DIR).is_dir():
        raise LayoutError(root, f"missing {SCENES_DIR}/ directory")
    tasks: list[TaskSpec] = []
    for fam_dir in sorted(p for p in root.iterdir() if p.is_dir() and p.name != SCENES_DIR):
        if fam_dir.name.startswith((".", "_")):
            continue
        family = FAMILY_DIRS.get(fam_dir.name)
        if family is None:
            raise UnknownFamily(fam_dir.name)
        desc_path = fam_dir / "description.txt"
        if not desc_path.is_file():
            raise LayoutError(fam_dir, "missing domain description (description.txt)")
        desc = desc_path.read_text().strip()
        if not desc:
            raise LayoutError(desc_path, "domain description is empty")
        for task_dir in sorted(p for p in fam_dir.iterdir() if p.is_dir()):
            tasks.append(_load_task(task_dir, family, desc, root))
    ids = [t.id for t in tasks]
    dup = sorted({i for i in ids if ids.count(i) > 1})
    if dup:
        raise LayoutError(root, f"duplicate task ids: {', '.join(dup)}")
    return tasks


def verify_dataset(root: str | Path) -> list[str]:
    """Human-readable summary lines; raises on the first layout problem."""
    tasks = load_dataset(root)
    lines = []
    for fam in sorted({t.family for t in tasks}):
        sub = [t for t in tasks if t.family == fam]
        imp = sum(t.designed_impossible for t in sub)
        lines.append(f"{fam}: {len(sub)} task(s), {imp} designed impossible")
    for t in tasks:
        t.load_scene()
    lines.append(f"total: {len(tasks)} task(s), {len({t.scene_id for t in tasks})} scene(s)")
    return lines
