"""Figures for bench reports, written as PNG files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import BenchReport  # noqa: E402
from .report import OVERALL  # noqa: E402


def plot_refinements(report: BenchReport, path: Path) -> Path:
    """Mean refinements at each relaxation index, one line per family."""
    fig, ax = plt.subplots(figsize=(6, 4))
    series = list(report.families.items()) + [(OVERALL, report.overall)]
    for name, agg in series:
        if not agg.refinements_curve:
            continue
        xs = list(range(len(agg.refinements_curve)))
        style = {"color": "black", "linewidth": 2.5} if name == OVERALL else {"alpha": 0.8}
        ax.plot(xs, agg.refinements_curve, marker="o", label=name, **style)
    ax.set_xlabel("relaxation index")
    ax.set_ylabel("mean refinements")
    ax.xaxis.get_major_locator().set_params(integer=True)
    ax.grid(alpha=0.3)
    if ax.lines:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_success_rates(report: BenchReport, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    names = list(report.families) + [OVERALL]
    aggs = list(report.families.values()) + [report.overall]
    metrics = [("sr_ground_plan", "grounding + planning"), ("sr_plan_only", "planning only"),
               ("sr_with_possibility", "with possibility check")]
    width = 0.8 / len(metrics)
    for j, (attr, label) in enumerate(metrics):
        vals = [getattr(a, attr) or 0.0 for a in aggs]
        ax.bar([i + j * width for i in range(len(names))], vals, width, label=label)
    ax.set_xticks([i + width for i in range(len(names))])
    ax.set_xticklabels(names, rotation=20, fontsize=8)
    ax.set_ylabel("success rate (%)")
    ax.set_ylim(0, 105)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_figures(report: BenchReport, outdir: str | Path) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    return [
        plot_refinements(report, outdir / "refinements_per_relaxation.png"),
        plot_success_rates(report, outdir / "success_rates.png"),
    ]
