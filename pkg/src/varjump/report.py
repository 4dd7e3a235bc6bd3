"""Report files: CSV rows, JSON summary and rows, SVG log-log line charts.

Everything except <name>.timings.json is a function of (config, seed, build),
so repeated runs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .experiments import ExperimentReport

FORMATS = ("csv", "json", "svg")


def _cell(v):
    if isinstance(v, bool):
        return int(v)
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, float):
        return repr(v)
    return v


def _jsonable(v):
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def csv_text(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(report.columns)
    for r in report.rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def summary_dict(report: ExperimentReport) -> dict:
    return _jsonable({
        "experiment": report.experiment,
        "passed": report.passed,
        "config": report.config,
        "summary": report.summary,
        "verdicts": [{"name": v.name, "criterion": v.criterion, "passed": v.passed,
                      "measured": v.measured, "bound": v.bound, "margin": v.margin, "note": v.note}
                     for v in report.verdicts],
    })


def rows_dict(report: ExperimentReport) -> list:
    return [_jsonable(dict(zip(report.columns, r))) for r in report.rows]


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def svg_text(title: str, series, width: int = 640, height: int = 420) -> str:
    """Log-log line chart; each series becomes one polyline tagged with its label."""
    pts = [(x, y) for _, s in series for x, y in s if x > 0 and y > 0]
    if not pts:
        raise ValueError("nothing positive to plot on log axes")
    lx = [math.log10(x) for x, _ in pts]
    ly = [math.log10(y) for _, y in pts]
    x0, x1 = min(lx), max(lx)
    y0, y1 = min(ly), max(ly)
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1
    pad = 50
    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")

    def px(x, y):
        u = pad + (math.log10(x) - x0) / (x1 - x0) * (width - 2 * pad)
        v = height - pad - (math.log10(y) - y0) / (y1 - y0) * (height - 2 * pad)
        return f"{u:.2f},{v:.2f}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<title>{_esc(title)}</title>',
           f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
           'fill="none" stroke="#888"/>',
           f'<text x="{width / 2:.0f}" y="{pad / 2:.0f}" text-anchor="middle" font-size="14">{_esc(title)}</text>',
           f'<text x="{pad}" y="{height - pad / 3:.0f}" font-size="11">log10 x: [{x0:.3g}, {x1:.3g}]  '
           f'log10 y: [{y0:.3g}, {y1:.3g}]</text>']
    for i, (label, s) in enumerate(series):
        p = " ".join(px(x, y) for x, y in s if x > 0 and y > 0)
        out.append(f'<polyline data-label="{_esc(label)}" fill="none" stroke="{colors[i % len(colors)]}" '
                   f'stroke-width="1.5" points="{p}"/>')
        out.append(f'<text x="{width - pad - 120}" y="{pad + 16 * (i + 1)}" font-size="11" '
                   f'fill="{colors[i % len(colors)]}">{_esc(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def emit_report(report: ExperimentReport, out_dir, formats=("csv", "json")) -> list:
    """Write the requested files into out_dir and return their paths.

    The summary and timings files are always written.
    """
    bad = [f for f in formats if f not in FORMATS]
    if bad:
        raise ValueError(f"unknown report format(s) {', '.join(bad)}; choose from {', '.join(FORMATS)}")
    out = Path(out_dir)
    name = report.experiment
    files = {}
    if "csv" in formats:
        files[f"{name}.csv"] = csv_text(report)
    if "json" in formats:
        files[f"{name}.rows.json"] = _dump(rows_dict(report))
    if "svg" in formats:
        for i, (title, series) in enumerate(report.plots):
            files[f"{name}.plot{i}.svg"] = svg_text(title, series)
    files[f"{name}.summary.json"] = _dump(summary_dict(report))
    files[f"{name}.timings.json"] = _dump(_jsonable(report.timings))
    paths = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for fn, text in files.items():
            p = out / fn
            p.write_text(text)
            paths.append(p)
    except OSError as e:
        raise OSError(f"cannot write report to {out}: {e}") from e
    return paths
