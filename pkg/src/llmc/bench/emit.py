"""Render a ComparisonReport as JSON, CSV, plot data, or a text table."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Dict, Iterable

from ..util import atomic_write_text
from .compare import ComparisonReport

FORMATS = ("json", "csv", "plotdata")
FILENAMES = {"json": "comparison.json", "csv": "comparison.csv", "plotdata": "coverage.tsv"}
CSV_COLUMNS = (
    "program", "strategy", "status", "branch_sites", "covered_directions", "branch_coverage",
    "path_count", "solver_invocations", "solver_timeouts", "work_units", "findings",
    "time_to_threshold", "error",
)


def to_csv(report: ComparisonReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(CSV_COLUMNS)
    for c in report.cells:
        t = c.time_to_threshold["iteration"] if c.time_to_threshold else ""
        w.writerow([
            c.program, c.strategy, c.status, c.branch_sites, c.covered_directions,
            f"{c.branch_coverage:.6f}", c.path_count, c.solver_invocations, c.solver_timeouts,
            c.work_units, ";".join(c.findings), t, c.error or "",
        ])
    return buf.getvalue()


def to_plotdata(report: ComparisonReport) -> str:
    """Tab-separated coverage curves, one block of rows per (strategy, program)."""
    lines = ["strategy\tprogram\titeration\twallclock_ms\tbranch_coverage"]
    for s in report.strategies:
        for c in report.cells:
            if c.strategy != s or not c.ok:
                continue
            for p in c.curve:
                lines.append(f"{s}\t{c.program}\t{p['iteration']}\t{p['wallclock_ms']}\t{p['branch_coverage']:.6f}")
    return "\n".join(lines) + "\n"


def render(report: ComparisonReport, fmt: str, wallclock: bool = True) -> str:
    if fmt == "json":
        return report.dumps(wallclock=wallclock)
    if fmt == "csv":
        return to_csv(report)
    if fmt == "plotdata":
        return to_plotdata(report)
    raise ValueError(f"unknown format {fmt!r} (expected one of {', '.join(FORMATS)})")


def emit(report: ComparisonReport, out_dir, formats: Iterable[str] = FORMATS) -> Dict[str, Path]:
    """Write each requested format under ``out_dir``; returns format -> path."""
    out_dir = Path(out_dir)
    written = {}
    for fmt in formats:
        text = render(report, fmt)
        path = out_dir / FILENAMES[fmt]
        atomic_write_text(path, text)
        written[fmt] = path
    return written


def text_table(report: ComparisonReport) -> str:
    """Compact human summary: per-program coverage grid plus the aggregate rows."""
    strategies = report.strategies
    width = max([len(p) for p in report.programs] + [9])
    head = "program".ljust(width) + "".join(s.rjust(10) for s in strategies)
    rows = [head, "-" * len(head)]
    for p in report.programs:
        cells = []
        for s in strategies:
            try:
                c = report.cell(p, s)
            except KeyError:
                cells.append("-".rjust(10))
                continue
            cells.append((f"{c.branch_coverage * 100:.1f}%" if c.ok else "FAILED").rjust(10))
        rows.append(p.ljust(width) + "".join(cells))
    rows.append("-" * len(head))
    agg = report.aggregates()
    for label, key, fmt in (
        ("branch cov", "branch_coverage", lambda v: f"{v * 100:.1f}%"),
        ("paths", "path_count", lambda v: f"{v:.1f}"),
        ("solver", "solver_invocations_total", str),
        ("timeouts", "solver_timeouts_total", str),
    ):
        rows.append(label.ljust(width) + "".join(fmt(agg[s][key]).rjust(10) for s in strategies))
    return "\n".join(rows) + "\n"
