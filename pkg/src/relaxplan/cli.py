"""Plan household tasks over scene graphs, check plans, and run benchmarks.

Exit status: 0 on success, 1 when the task itself fails (no plan, invalid
plan, ungrounded symbols, exhausted budgets), 2 on usage or configuration
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .checker import instantiate_check, render_feedback, validate_plan
from .grounding import check_ground, validate_ground
from .harness import (
    FORMATS,
    LayoutError,
    UnknownFamily,
    load_dataset,
    prepare_scene,
    render_report,
    resolve_root,
    run_bench,
    scripted_backend,
    verify_dataset,
)
from .orchestrator import ConfigError, SolveConfig, run_report, solve
from .pddl import PDDLError, parse_domain, parse_plan, parse_problem, render
from .planner import GroundingExplosion, Limits, Mode, ground, search
from .scene import SceneError, distill, dump_scene, item_from_dict, parse_scene, scatter_items

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _limits(args) -> Limits:
    return Limits(max_expanded=args.max_expanded, max_seconds=args.max_seconds)


def _add_planner_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.GBFS_HADD.value)
    p.add_argument("--max-expanded", type=int, default=None, help="node expansion budget")
    p.add_argument("--max-seconds", type=float, default=None, help="wall-clock budget per search")


def _add_solve_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=["scripted", "llm"], default="scripted")
    p.add_argument("--model", help="model id for the llm backend")
    p.add_argument("--endpoint", help="chat-completions URL for the llm backend")
    p.add_argument("--max-outer", type=int, default=4)
    p.add_argument("--max-inner", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-possibility", action="store_true", help="skip the possibility check")
    _add_planner_flags(p)


def _config(args):
    """SolveConfig plus a per-task backend factory."""
    if args.backend == "scripted":
        factory = scripted_backend
    else:
        from .semantic import LLMBackend, LLMConfig
        backend = LLMBackend(LLMConfig.from_env(model=args.model, endpoint=args.endpoint))
        factory = lambda task: backend  # noqa: E731  one shared client across tasks
    try:
        cfg = SolveConfig(max_outer=args.max_outer, max_inner=args.max_inner, mode=Mode(args.mode),
                          limits=_limits(args), possibility_check=not args.no_possibility)
    except ConfigError as e:
        raise UsageError(str(e)) from None
    return cfg, factory


def _write_json(path: Path, doc) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _run_meta(args, extra: dict) -> dict:
    return {
        "version": __version__,
        "command": args.command,
        "argv": list(getattr(args, "argv", [])),
        "started": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        **extra,
    }


# -- subcommands -------------------------------------------------------------


def cmd_plan(args) -> int:
    domain = parse_domain(_read(args.domain))
    problem = parse_problem(_read(args.problem), domain)
    try:
        result = search(ground(domain, problem), args.mode, _limits(args))
    except GroundingExplosion as e:
        print(f"planner: {e}", file=sys.stderr)
        return EXIT_FAIL
    s = result.stats
    print(f"; outcome={result.outcome.value} expanded={s.expanded_nodes} generated={s.generated_nodes} "
          f"time={s.wall_time:.4f}s", file=sys.stderr)
    if not result.solved:
        return EXIT_FAIL
    text = render(result.plan)
    if args.output:
        Path(args.output).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    domain = parse_domain(_read(args.domain))
    problem = parse_problem(_read(args.problem), domain, strict=False)
    report = instantiate_check(domain, problem)
    if report.ok and args.plan:
        report = validate_plan(domain, problem, parse_plan(_read(args.plan), domain))
    if args.json:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        print(render_feedback(report))
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_ground_check(args) -> int:
    domain = parse_domain(_read(args.domain))
    plan = parse_plan(_read(args.plan), domain)
    scene = distill(parse_scene(_read(args.scene)))
    report = check_ground(plan, scene, domain)
    if args.json:
        doc = report.to_dict()
        doc["feedback"] = [f.to_dict() for f in validate_ground(plan, scene, report)]
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        items = list(report.warnings) + validate_ground(plan, scene, report)
        print(render_feedback(items) if items else "grounding passed")
    return EXIT_OK if report.ok else EXIT_FAIL


def _find_task(root: Path, task_id: str):
    for t in load_dataset(root):
        if t.id == task_id:
            return t
    raise UsageError(f"no task {task_id!r} in {root}")


def cmd_solve(args) -> int:
    root = resolve_root(args.dataset)
    task = _find_task(root, args.task)
    cfg, factory = _config(args)
    cfg = replace(cfg, backend=factory(task))
    scene = prepare_scene(task, args.seed)
    result = solve(task.goal_text, scene, task.domain_desc, cfg)
    out = Path(args.out or f"runs/solve-{task.id}-seed{args.seed}")
    report = run_report(result, cfg)
    report["task"] = task.id
    _write_json(out / "run.json", _run_meta(args, {"task": task.id, "seed": args.seed, "config": cfg.to_dict()}))
    _write_json(out / "trace.json", report)
    t = result.trace
    print(f"; {task.id}: {result.outcome.value} after {len(t.steps)} outer iteration(s), "
          f"relaxations={t.total_relaxations} refinements={t.total_refinements} -> {out}", file=sys.stderr)
    if result.grounded:
        sys.stdout.write(render(result.plan))
        return EXIT_OK
    return EXIT_FAIL


def cmd_bench(args) -> int:
    root = resolve_root(args.dataset)
    tasks = load_dataset(root)
    if args.family:
        tasks = [t for t in tasks if t.family == args.family]
    cfg, factory = _config(args)
    report = run_bench(tasks, cfg, workers=args.workers, seed=args.seed, backend_factory=factory)
    out = Path(args.out or f"runs/bench-{args.backend}-seed{args.seed}")
    out.mkdir(parents=True, exist_ok=True)
    files = {"table": "report.txt", "csv": "report.csv", "machine": "report.json"}
    for fmt, name in files.items():
        (out / name).write_bytes(render_report(report, fmt))
    _write_json(out / "run.json", _run_meta(args, {"dataset": str(root), **report.metadata,
                                                   "workers": args.workers, "tasks": len(tasks)}))
    if not args.no_figures:
        from .harness.plotting import save_figures
        save_figures(report, out)
    sys.stdout.buffer.write(render_report(report, args.format))
    sys.stdout.flush()
    print(f"; report written to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_scatter(args) -> int:
    scene = parse_scene(_read(args.scene))
    try:
        items = json.loads(_read(args.items))
    except json.JSONDecodeError as e:
        raise UsageError(f"{args.items}: invalid JSON: {e}") from None
    scattered = scatter_items(scene, [item_from_dict(d) for d in items], args.seed)
    text = dump_scene(scattered)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_dataset_verify(args) -> int:
    for line in verify_dataset(resolve_root(args.path)):
        print(line)
    return EXIT_OK


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="relaxplan", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("plan", help="run the planner on a domain/problem pair")
    p.add_argument("-d", "--domain", required=True)
    p.add_argument("-p", "--problem", required=True)
    p.add_argument("-o", "--output", help="also write the plan here")
    _add_planner_flags(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("validate", help="check a problem, and optionally a plan, against a domain")
    p.add_argument("-d", "--domain", required=True)
    p.add_argument("-p", "--problem", required=True)
    p.add_argument("--plan")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("ground-check", help="map plan arguments to scene entities")
    p.add_argument("-d", "--domain", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("--scene", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ground_check)

    p = sub.add_parser("solve", help="run one dataset task end to end")
    p.add_argument("--dataset", required=True, help="dataset root, or 'mini' for the bundled one")
    p.add_argument("--task", required=True)
    p.add_argument("--out", help="run directory (default runs/solve-<task>-seed<seed>)")
    _add_solve_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run every task of a dataset and write reports and figures")
    p.add_argument("--dataset", required=True, help="dataset root, or 'mini' for the bundled one")
    p.add_argument("--family", help="restrict to one family, e.g. HouseCleaning")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=FORMATS, default="table", help="what to print on standard output")
    p.add_argument("--out", help="run directory (default runs/bench-<backend>-seed<seed>)")
    p.add_argument("--no-figures", action="store_true")
    _add_solve_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("scatter", help="place items in random rooms of a scene")
    p.add_argument("--scene", required=True)
    p.add_argument("--items", required=True, help="JSON list of {id, description, attributes}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("dataset", help="dataset utilities")
    dsub = p.add_subparsers(dest="dataset_command", required=True, metavar="ACTION")
    v = dsub.add_parser("verify", help="check a dataset directory against the expected layout")
    v.add_argument("path")
    v.set_defaults(func=cmd_dataset_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    args.argv = argv
    try:
        return args.func(args)
    except (UsageError, ConfigError, LayoutError, UnknownFamily) as e:
        print(f"relaxplan {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (PDDLError, SceneError) as e:
        print(f"relaxplan {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
