"""Regenerate the bundled mini dataset under src/relaxplan/data/mini.

Scenes and task metadata are written from the tables below. Ground-truth
domain/problem/plan files are produced by running the scripted pipeline with
seed 0 and are only written for tasks that end grounded.
"""

import json
import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
OUT = ROOT / "src" / "relaxplan" / "data" / "mini"

DESCRIPTIONS = {
    "dining_setup": "A robot moves between rooms, picks up one piece of tableware at a time and places it on a table.",
    "house_cleaning": "A robot moves between rooms, carries cleaning tools and waste, mops floors with a tool and throws waste into a bin.",
    "pc_assembly": "A robot moves between rooms, carries computer parts one at a time and installs them into a PC case.",
    "laundry": "A robot moves between rooms, loads garments into a washing machine, adds a cleanser and starts the wash cycle.",
    "office_setup": "A robot moves between rooms, takes items out of containers such as drawers and puts them on a desk.",
}

FILLER = {
    "kitchen": ["refrigerator", "sink", "oven", "microwave", "kettle", "toaster"],
    "living_room": ["sofa", "tv", "armchair", "coffee_table", "lamp", "bookshelf", "plant"],
    "bathroom": ["toilet", "bathtub", "mirror", "towel_rack"],
    "bedroom": ["bed", "wardrobe", "nightstand", "alarm_clock"],
    "dining_room": ["chair", "chair", "chair", "chair", "sideboard"],
    "office": ["office_chair", "monitor", "printer"],
    "laundry_room": ["ironing_board", "laundry_basket"],
    "corridor": ["coat_rack", "shoe_cabinet"],
}

SCENES = {
    "allensville": {
        "rooms": ["kitchen", "living_room", "dining_room", "bathroom", "bedroom", "office", "laundry_room", "corridor"],
        "furniture": {"dining_table": "dining_room", "trash_bin": "kitchen", "washing_machine": "laundry_room",
                      "desk": "office", "drawer": "office"},
    },
    "kemblesville": {
        "rooms": ["kitchen", "living_room", "dining_room", "bathroom", "bedroom", "office"],
        "furniture": {"dining_table": "dining_room", "desk": "office", "drawer": "office"},
    },
    "parole": {
        "rooms": ["kitchen", "living_room", "dining_room", "bathroom", "bedroom"],
        "furniture": {"dining_table": "dining_room", "washing_machine": "bathroom"},
    },
    "shelbiana": {
        "rooms": ["kitchen", "living_room", "bathroom", "bedroom", "office", "corridor"],
        "furniture": {"trash_bin": "kitchen", "washing_machine": "bathroom", "desk": "office", "drawer": "office"},
    },
}


def item(oid, desc, inside=None):
    d = {"id": oid, "description": desc}
    if inside:
        d["attributes"] = {"inside": inside}
    return d


TASKS = {
    "dining_setup": {
        "ds_01": {
            "scene": "allensville", "goal": "Set the dining table with a plate, a fork and a cup.",
            "items": [item("plate_1", "a white ceramic plate"), item("fork_1", "a steel fork"), item("cup_1", "a coffee cup")],
            "script": {"goal": "(and (on plate_1 dining_table_1) (on fork_1 dining_table_1) (on cup_1 dining_table_1))"},
        },
        "ds_02": {
            "scene": "kemblesville", "goal": "Put two plates on the dining table.",
            "items": [item("plate_1", "a white plate"), item("plate_2", "a white plate")],
            "script": {"goal": "(and (on plate_1 dining_table_1) (on plate_2 dining_table_1))"},
        },
        "ds_03": {
            "scene": "parole", "goal": "Set the dining table with a plate and a fork, and add napkins.",
            "designed_impossible": True,
            "items": [item("plate_1", "a white plate"), item("fork_1", "a steel fork")],
            "script": {
                "goal": "(and (on plate_1 dining_table_1) (on fork_1 dining_table_1) (on napkin_1 dining_table_1))",
                "relax_order": [{"name": "napkins", "literals": ["(on napkin_1 dining_table_1)"], "phrase": ", and add napkins"}],
            },
        },
    },
    "house_cleaning": {
        "hc_01": {
            "scene": "allensville", "goal": "Mop the kitchen floor.",
            "items": [item("mop_1", "a string mop")],
            "script": {"goal": "(mopped kitchen mop_1)"},
        },
        "hc_02": {
            "scene": "shelbiana", "goal": "Throw the banana peel in the trash bin and mop the bathroom floor.",
            "items": [item("banana_peel_1", "a banana peel"), item("mop_1", "a string mop")],
            "script": {"goal": "(and (disposed banana_peel_1) (mopped bathroom mop_1))"},
        },
        "hc_03": {
            "scene": "kemblesville", "goal": "Mop the kitchen floor.",
            "designed_impossible": True,
            "items": [item("sponge_1", "a yellow kitchen sponge")],
            "script": {"goal": "(mopped kitchen mop_1)", "hallucinate": True},
        },
    },
    "pc_assembly": {
        "pc_01": {
            "scene": "parole", "goal": "Install the CPU and the RAM stick into the PC case.",
            "items": [item("pc_case_1", "a mid-tower PC case"), item("cpu_1", "a boxed CPU"),
                      item("ram_stick_1", "a DDR4 memory module")],
            "script": {"goal": "(and (installed cpu_1 pc_case_1) (installed ram_stick_1 pc_case_1))",
                       "defects": {"0": ["(hand-free robot robot)"]}},
        },
        "pc_02": {
            "scene": "allensville", "goal": "Install the SSD into the PC case.",
            "items": [item("pc_case_1", "a mid-tower PC case"), item("ssd_1", "a 1TB solid state drive")],
            "script": {"goal": "(installed ssd_1 pc_case_1)"},
        },
        "pc_03": {
            "scene": "shelbiana", "goal": "Install the graphics card, the CPU and the power supply into the PC case.",
            "items": [item("pc_case_1", "a PC case"), item("gpu_1", "a graphics card"), item("cpu_1", "a CPU"),
                      item("power_supply_1", "a 650W power supply")],
            "script": {"goal": "(and (installed gpu_1 pc_case_1) (installed cpu_1 pc_case_1) (installed power_supply_1 pc_case_1))"},
        },
    },
    "laundry": {
        "la_01": {
            "scene": "allensville", "goal": "Wash the shirt with detergent.",
            "items": [item("shirt_1", "a dirty cotton shirt"), item("detergent_1", "a bottle of laundry detergent")],
            "script": {"goal": "(and (in shirt_1 washing_machine_1) (washed-with washing_machine_1 detergent_1))"},
        },
        "la_02": {
            "scene": "parole", "goal": "Wash the shirt and the towel with detergent.",
            "items": [item("shirt_1", "a dirty shirt"), item("towel_1", "a used bath towel"),
                      item("detergent_1", "a bottle of laundry detergent")],
            "script": {"goal": "(and (in shirt_1 washing_machine_1) (in towel_1 washing_machine_1) (washed-with washing_machine_1 detergent_1))"},
        },
        "la_03": {
            "scene": "shelbiana", "goal": "Wash the towel with detergent.",
            "designed_impossible": True,
            "items": [item("towel_1", "a used bath towel"), item("soap_1", "a bar of soap")],
            "script": {"goal": "(and (in towel_1 washing_machine_1) (washed-with washing_machine_1 detergent_1))",
                       "hallucinate": True},
        },
    },
    "office_setup": {
        "os_01": {
            "scene": "allensville", "goal": "Put the laptop and the pen from the drawer on the desk.",
            "items": [item("laptop_1", "a silver laptop"), item("pen_1", "a blue pen", inside="drawer_1")],
            "script": {"goal": "(and (on laptop_1 desk_1) (on pen_1 desk_1))",
                       "extra_init": ["(in pen_1 drawer_1)"],
                       "defects": {"0": ["(connected office kitchen)"]}},
        },
        "os_02": {
            "scene": "kemblesville", "goal": "Put every office supply on the desk.",
            "items": [item("stapler_1", "a black stapler"), item("notebook_1", "a spiral notebook")],
            "script": {"goal": "(forall (?s - supply) (on ?s desk_1))"},
        },
        "os_03": {
            "scene": "shelbiana", "goal": "Put the laptop on the desk and leave no supplies in the drawer.",
            "items": [item("laptop_1", "a silver laptop"), item("pen_1", "a blue pen", inside="drawer_1"),
                      item("pencil_1", "a pencil", inside="drawer_1")],
            "script": {"goal": "(and (on laptop_1 desk_1) (forall (?s - supply) (not (in ?s drawer_1))))",
                       "extra_init": ["(in pen_1 drawer_1)", "(in pencil_1 drawer_1)"]},
        },
    },
}


def build_scene(scene_id, layout):
    rooms = [{"id": r, "label": r.replace("_", " ")} for r in layout["rooms"]]
    objects, counts = [], {}

    def add(label, room):
        counts[label] = counts.get(label, 0) + 1
        objects.append({"id": f"{label}_{counts[label]}", "label": label,
                        "description": f"a {label.replace('_', ' ')}", "room_id": room})

    for label, room in layout["furniture"].items():
        add(label, room)
    for room in layout["rooms"]:
        for label in FILLER.get(room, []):
            add(label, room)
    return {"scene_id": scene_id, "rooms": rooms, "objects": objects}


def main():
    if OUT.exists():
        shutil.rmtree(OUT)
    (OUT / "scenes").mkdir(parents=True)
    for sid, layout in SCENES.items():
        (OUT / "scenes" / f"{sid}.json").write_text(json.dumps(build_scene(sid, layout), indent=2) + "\n")
    for fam, tasks in TASKS.items():
        (OUT / fam).mkdir()
        (OUT / fam / "description.txt").write_text(DESCRIPTIONS[fam] + "\n")
        for tid, meta in tasks.items():
            d = OUT / fam / tid
            d.mkdir()
            doc = {"id": tid, "goal": meta["goal"], "scene": meta["scene"],
                   "designed_impossible": meta.get("designed_impossible", False),
                   "items": meta["items"], "script": meta["script"]}
            (d / "task.meta").write_text(json.dumps(doc, indent=2) + "\n")

    sys.path.insert(0, str(ROOT / "src"))
    from relaxplan.harness import FAMILY_DIRS, load_dataset, run_task, scripted_backend
    from relaxplan.orchestrator import SolveConfig
    from relaxplan.pddl import render

    for task in load_dataset(OUT):
        run = run_task(task, SolveConfig(), 0, scripted_backend)
        res = run.result
        if res is None or not res.grounded:
            print(f"{task.id}: not grounded ({run.record.outcome})", file=sys.stderr)
            continue
        fam_dir = next(k for k, v in FAMILY_DIRS.items() if v == task.family)
        d = OUT / fam_dir / task.id
        (d / "domain.pddl").write_text(render(res.domain))
        (d / "problem.pddl").write_text(render(res.problem))
        (d / "plan.plan").write_text(render(res.plan))
        print(f"{task.id}: grounded, {len(res.plan)} steps, {res.trace.total_relaxations} relaxation(s)")


if __name__ == "__main__":
    main()
