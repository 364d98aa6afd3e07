"""Render bench reports as an aligned table, per-task CSV, or JSON."""

from __future__ import annotations

import csv
import io
import json

from .bench import BenchReport
from .metrics import Aggregates

FORMATS = ("table", "csv", "machine")
NA = "N/A"

# (header, Aggregates attribute)
TABLE_COLUMNS = (
    ("SR_ground_plan", "sr_ground_plan"),
    ("SR_plan_only", "sr_plan_only"),
    ("SR_with_possibility", "sr_with_possibility"),
    ("plan_length", "avg_plan_length"),
    ("time_s", "avg_time_s"),
    ("expanded", "avg_expanded"),
    ("relaxations", "avg_relaxations"),
)
CSV_COLUMNS = (
    "task_id", "family", "success_planning", "success_grounding", "possibility_verdict", "plan_length",
    "planning_time_s", "expanded_nodes", "relaxations", "refinements_per_relaxation", "outcome",
    "designed_impossible", "error",
)
OVERALL = "ALL"


def fmt_num(x: float | None) -> str:
    return NA if x is None else f"{x:.2f}"


def _parse_num(cell: str) -> float | None:
    return None if cell == NA else float(cell)


def _table(report: BenchReport) -> str:
    rows = [(fam, agg) for fam, agg in report.families.items()] + [(OVERALL, report.overall)]
    header = ["family", "N"] + [h for h, _ in TABLE_COLUMNS]
    body = [[fam, str(agg.n)] + [fmt_num(getattr(agg, a)) for _, a in TABLE_COLUMNS] for fam, agg in rows]
    widths = [max(len(r[c]) for r in [header] + body) for c in range(len(header))]

    def line(cells):
        return "  ".join(c.ljust(w) if j == 0 else c.rjust(w) for j, (c, w) in enumerate(zip(cells, widths)))

    out = [f"# {k}={report.metadata[k]}" for k in sorted(report.metadata)]
    out += [line(header), line(["-" * w for w in widths])]
    out += [line(r) for r in body]
    out.append("")
    out.append("refinements per relaxation index:")
    for fam, agg in rows:
        curve = " ".join(fmt_num(v) for v in agg.refinements_curve) or NA
        out.append(f"  {fam}: {curve}")
    return "\n".join(out) + "\n"


def parse_table(text: str) -> dict[str, Aggregates]:
    """Inverse of the table format, up to its two-decimal rounding."""
    lines = text.splitlines()
    start = next(i for i, l in enumerate(lines) if l.startswith("family"))
    result: dict[str, Aggregates] = {}
    i = start + 2
    while i < len(lines) and lines[i].strip():
        cells = lines[i].split()
        agg = Aggregates(n=int(cells[1]))
        for (_, attr), cell in zip(TABLE_COLUMNS, cells[2:]):
            setattr(agg, attr, _parse_num(cell))
        result[cells[0]] = agg
        i += 1
    for l in lines[i:]:
        if l.startswith("  ") and ":" in l:
            fam, _, rest = l.strip().partition(":")
            vals = rest.split()
            result[fam].refinements_curve = [] if vals == [NA] else [float(v) for v in vals]
    return result


def rounded(agg: Aggregates) -> Aggregates:
    """The aggregates as they appear in the table."""
    out = Aggregates(n=agg.n)
    for _, attr in TABLE_COLUMNS:
        v = getattr(agg, attr)
        setattr(out, attr, None if v is None else float(fmt_num(v)))
    out.refinements_curve = [float(fmt_num(v)) for v in agg.refinements_curve]
    return out


def _csv(report: BenchReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.records:
        d = r.to_dict()
        d["refinements_per_relaxation"] = ";".join(str(n) for n in r.refinements_per_relaxation)
        w.writerow(["" if d[c] is None else d[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def render_report(report: BenchReport, fmt: str = "table", *, timing: bool = True) -> bytes:
    if fmt == "table":
        return _table(report).encode()
    if fmt == "csv":
        return _csv(report).encode()
    if fmt == "machine":
        return (json.dumps(report.to_dict(timing=timing), indent=2, sort_keys=True) + "\n").encode()
    raise ValueError(f"unknown report format {fmt!r}; expected one of {', '.join(FORMATS)}")
