"""Datasets, benchmark runs, metrics and reports."""

from .bench import BenchReport, TaskRun, build_report, prepare_scene, run_bench, run_task, scripted_backend, task_seed
from .dataset import FAMILY_DIRS, LayoutError, TaskSpec, UnknownFamily, bundled_mini, load_dataset, resolve_root, verify_dataset
from .metrics import Aggregates, TaskRecord, aggregate, aggregate_by_family, macro_average, refinements_curve
from .report import FORMATS, parse_table, render_report, rounded

__all__ = [
    "BenchReport", "TaskRun", "build_report", "prepare_scene", "run_bench", "run_task", "scripted_backend",
    "task_seed", "FAMILY_DIRS", "LayoutError", "TaskSpec", "UnknownFamily", "bundled_mini", "load_dataset",
    "resolve_root", "verify_dataset", "Aggregates", "TaskRecord", "aggregate", "aggregate_by_family",
    "macro_average", "refinements_curve", "FORMATS", "parse_table", "render_report", "rounded",
]
