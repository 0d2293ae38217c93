"""Benchmark result container and emitters.

A report is a flat table of per-replication metric triples keyed by
method label, plus free-form metadata.  Emitters render it as CSV, a
versioned JSON document, or self-contained SVG charts (a metric-space
scatter and a normalized radar of method aggregates).  No plotting
dependency; the SVG is assembled directly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError

__all__ = ["ReportRow", "Report", "emit_report"]

_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
    "#bcbd22",
    "#e377c2",
)

_FIELDS = ("delta1", "delta2", "value")


@dataclass
class ReportRow:
    method: str
    rep: int
    delta1: float
    delta2: float
    value: float


@dataclass
class Report:
    rows: list
    metadata: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def methods(self) -> list:
        """Method labels in order of first appearance."""
        seen = []
        for row in self.rows:
            if row.method not in seen:
                seen.append(row.method)
        return seen

    def column(self, method: str, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows if r.method == method])

    def aggregates(self) -> dict:
        """Per-method mean, sd, and standard error of each metric."""
        out = {}
        for method in self.methods():
            stats = {}
            n_rep = 0
            for name in _FIELDS:
                col = self.column(method, name)
                n_rep = col.size
                sd = float(col.std(ddof=1)) if col.size > 1 else 0.0
                stats[f"{name}_mean"] = float(col.mean())
                stats[f"{name}_sd"] = sd
                stats[f"{name}_se"] = sd / np.sqrt(col.size) if col.size > 0 else 0.0
            stats["n_rep"] = int(n_rep)
            out[method] = stats
        return out


def _emit_csv(report: Report) -> str:
    lines = ["method,rep,delta1,delta2,value"]
    for r in report.rows:
        lines.append(f"{r.method},{r.rep},{r.delta1!r},{r.delta2!r},{r.value!r}")
    return "\n".join(lines) + "\n"


def _emit_json(report: Report) -> str:
    payload = {
        "schema_version": 1,
        "metadata": report.metadata,
        "aggregates": report.aggregates(),
        "rows": [
            {
                "method": r.method,
                "rep": r.rep,
                "delta1": r.delta1,
                "delta2": r.delta2,
                "value": r.value,
            }
            for r in report.rows
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def _axis_ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, n)


def _emit_scatter(report: Report) -> str:
    """Rows in fairness-metric space, one color per method."""
    width, height = 560, 420
    left, right, top, bottom = 70, 170, 30, 60
    pw, ph = width - left - right, height - top - bottom
    d1 = np.array([r.delta1 for r in report.rows])
    d2 = np.array([r.delta2 for r in report.rows])
    lo1, hi1 = float(d1.min()), float(d1.max())
    lo2, hi2 = float(d2.min()), float(d2.max())
    pad1 = 0.05 * (hi1 - lo1) or 0.5
    pad2 = 0.05 * (hi2 - lo2) or 0.5
    lo1, hi1 = lo1 - pad1, hi1 + pad1
    lo2, hi2 = lo2 - pad2, hi2 + pad2

    def sx(x):
        return left + (x - lo1) / (hi1 - lo1) * pw

    def sy(y):
        return top + ph - (y - lo2) / (hi2 - lo2) * ph

    methods = report.methods()
    color = {m: _PALETTE[i % len(_PALETTE)] for i, m in enumerate(methods)}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>',
    ]
    for t in _axis_ticks(lo1, hi1):
        x = sx(t)
        parts.append(f'<line x1="{x:.1f}" y1="{top + ph}" x2="{x:.1f}" y2="{top + ph + 4}" stroke="#333"/>')
        parts.append(f'<text x="{x:.1f}" y="{top + ph + 16}" text-anchor="middle">{t:.3g}</text>')
    for t in _axis_ticks(lo2, hi2):
        y = sy(t)
        parts.append(f'<line x1="{left - 4}" y1="{y:.1f}" x2="{left}" y2="{y:.1f}" stroke="#333"/>')
        parts.append(f'<text x="{left - 7}" y="{y + 3:.1f}" text-anchor="end">{t:.3g}</text>')
    parts.append(
        f'<text x="{left + pw / 2}" y="{height - 14}" text-anchor="middle">action-fairness gap</text>'
    )
    parts.append(
        f'<text x="16" y="{top + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2})">outcome-fairness gap</text>'
    )
    for r in report.rows:
        parts.append(
            f'<circle cx="{sx(r.delta1):.1f}" cy="{sy(r.delta2):.1f}" r="3.5" '
            f'fill="{color[r.method]}" fill-opacity="0.55">'
            f"<title>{r.method} rep {r.rep}: value {r.value:.4g}</title></circle>"
        )
    ly = top + 8
    for m in methods:
        parts.append(f'<circle cx="{left + pw + 16}" cy="{ly}" r="4" fill="{color[m]}"/>')
        parts.append(f'<text x="{left + pw + 26}" y="{ly + 4}">{m}</text>')
        ly += 18
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _radar_scores(report: Report) -> dict:
    """Per-method axis scores in [0, 1]; larger is better on every axis.

    Fairness axes are min-max normalized and inverted; the value axis
    is normalized directly.  A degenerate axis (no spread) scores 0.5.
    """
    agg = report.aggregates()
    methods = list(agg)
    scores = {m: [] for m in methods}
    for name, invert in (("delta1", True), ("delta2", True), ("value", False)):
        vals = np.array([agg[m][f"{name}_mean"] for m in methods])
        lo, hi = float(vals.min()), float(vals.max())
        if hi - lo <= 0:
            norm = np.full(vals.shape, 0.5)
        else:
            norm = (vals - lo) / (hi - lo)
            if invert:
                norm = 1.0 - norm
        for m, s in zip(methods, norm):
            scores[m].append(float(s))
    return scores


def _emit_radar(report: Report) -> str:
    width = height = 440
    cx, cy, radius = 190.0, height / 2.0, 140.0
    labels = ("action fairness", "outcome fairness", "value")
    angles = np.array([np.pi / 2 + 2 * np.pi * i / 3 for i in range(3)])

    def point(i, frac):
        return (
            cx + radius * frac * np.cos(angles[i]),
            cy - radius * frac * np.sin(angles[i]),
        )

    scores = _radar_scores(report)
    methods = list(scores)
    color = {m: _PALETTE[i % len(_PALETTE)] for i, m in enumerate(methods)}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for frac in (0.25, 0.5, 0.75, 1.0):
        ring = " ".join(f"{x:.1f},{y:.1f}" for x, y in (point(i, frac) for i in range(3)))
        parts.append(f'<polygon points="{ring}" fill="none" stroke="#ccc"/>')
    for i, label in enumerate(labels):
        x, y = point(i, 1.0)
        parts.append(f'<line x1="{cx}" y1="{cy}" x2="{x:.1f}" y2="{y:.1f}" stroke="#ccc"/>')
        lx, ly = point(i, 1.18)
        parts.append(f'<text x="{lx:.1f}" y="{ly:.1f}" text-anchor="middle">{label}</text>')
    for m in methods:
        poly = " ".join(
            f"{x:.1f},{y:.1f}" for x, y in (point(i, scores[m][i]) for i in range(3))
        )
        parts.append(
            f'<polygon points="{poly}" fill="{color[m]}" fill-opacity="0.18" '
            f'stroke="{color[m]}" stroke-width="2"/>'
        )
    ly = 24.0
    for m in methods:
        parts.append(f'<rect x="{width - 120}" y="{ly - 9}" width="12" height="12" fill="{color[m]}"/>')
        parts.append(f'<text x="{width - 103}" y="{ly + 1}">{m}</text>')
        ly += 18
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_report(report: Report, fmt: str, path: Optional[str] = None) -> str:
    """Render the report; write to ``path`` when given, return the text."""
    if not report.rows:
        raise ConfigError("cannot emit an empty report")
    emitters = {
        "csv": _emit_csv,
        "json": _emit_json,
        "svg-scatter": _emit_scatter,
        "svg-radar": _emit_radar,
    }
    if fmt not in emitters:
        raise ConfigError(f"unknown report format {fmt!r}")
    text = emitters[fmt](report)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
