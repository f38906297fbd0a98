"""CSV, JSON and SVG writers for study reports.

Floats are written with ``repr`` (shortest round-trip form) so re-parsing
reproduces every value exactly.
"""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

STUDY_HEADER = ["level", "n", "h", "q", "mesh_ratio", "l2_error", "cond_est", "wall_ms"]


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def study_csv(report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(STUDY_HEADER)
    for r in report.rows:
        writer.writerow([fmt(r.level), fmt(r.n), fmt(r.h), fmt(r.q), fmt(r.mesh_ratio),
                         fmt(r.l2_error), fmt(r.cond_est), fmt(r.wall_ms)])
    return buf.getvalue()


def parse_study_csv(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [{k: (int(v) if k in ("level", "n") else float(v)) for k, v in row.items()} for row in rows]


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def study_json(report) -> str:
    # NaN/inf are not valid JSON; map them to null.
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return None
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, list):
            return [clean(x) for x in v]
        return v

    return json.dumps(clean(report.to_dict()), indent=2, sort_keys=True, default=_json_default) + "\n"


def loglog_svg(h, err, slope=None, intercept=None, reference_slope=None, title="",
               width: int = 480, height: int = 360) -> str:
    """Log-log scatter of ``(h, err)`` with the fitted and reference lines."""
    h = np.asarray(h, dtype=float)
    err = np.asarray(err, dtype=float)
    ok = (h > 0) & (err > 0) & np.isfinite(h) & np.isfinite(err)
    lx, ly = np.log10(h[ok]), np.log10(err[ok])
    if lx.size == 0:
        lx, ly = np.array([0.0]), np.array([0.0])
    xmin, xmax = math.floor(lx.min()), math.ceil(lx.max())
    ymin, ymax = math.floor(ly.min()), math.ceil(ly.max())
    xmax = xmax if xmax > xmin else xmin + 1
    ymax = ymax if ymax > ymin else ymin + 1
    left, right, top, bottom = 70, 20, 40, 50

    def px(x):
        return left + (x - xmin) / (xmax - xmin) * (width - left - right)

    def py(y):
        return height - bottom - (y - ymin) / (ymax - ymin) * (height - top - bottom)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="13">{_esc(title)}</text>',
           f'<rect x="{left}" y="{top}" width="{width - left - right}" height="{height - top - bottom}" '
           'fill="none" stroke="black"/>']
    for e in range(xmin, xmax + 1):
        out.append(f'<line x1="{px(e):.1f}" y1="{height - bottom}" x2="{px(e):.1f}" '
                   f'y2="{height - bottom + 5}" stroke="black"/>')
        out.append(f'<text x="{px(e):.1f}" y="{height - bottom + 18}" text-anchor="middle">1e{e}</text>')
    for e in range(ymin, ymax + 1):
        out.append(f'<line x1="{left - 5}" y1="{py(e):.1f}" x2="{left}" y2="{py(e):.1f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py(e) + 4:.1f}" text-anchor="end">1e{e}</text>')
    out.append(f'<text x="{width / 2:.1f}" y="{height - 10}" text-anchor="middle">fill distance h</text>')
    out.append(f'<text x="15" y="{height / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 15 {height / 2:.1f})">L2 error</text>')
    x0, x1 = lx.min(), lx.max()
    if slope is not None and intercept is not None:
        y0, y1 = intercept / math.log(10) + slope * x0, intercept / math.log(10) + slope * x1
        out.append(f'<line x1="{px(x0):.1f}" y1="{py(y0):.1f}" x2="{px(x1):.1f}" y2="{py(y1):.1f}" '
                   f'stroke="#1f77b4" stroke-width="1.5"/>')
    if reference_slope is not None:
        # Anchored at the coarsest point.
        y0 = ly[0]
        y1 = y0 + reference_slope * (x1 - x0)
        out.append(f'<line x1="{px(x0):.1f}" y1="{py(y0):.1f}" x2="{px(x1):.1f}" y2="{py(y1):.1f}" '
                   'stroke="#d62728" stroke-dasharray="5,4" stroke-width="1.5"/>')
    for x, y in zip(lx, ly):
        out.append(f'<circle cx="{px(x):.1f}" cy="{py(y):.1f}" r="3.5" fill="black"/>')
    legend = []
    if slope is not None:
        legend.append(("#1f77b4", f"fitted slope {slope:.3f}"))
    if reference_slope is not None:
        legend.append(("#d62728", f"predicted slope {reference_slope:.3f}"))
    for i, (color, text) in enumerate(legend):
        y = top + 15 + 15 * i
        out.append(f'<line x1="{left + 10}" y1="{y - 4}" x2="{left + 30}" y2="{y - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + 35}" y="{y}">{_esc(text)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def study_svg(report) -> str:
    rows = [r for r in report.rows if r.level in report.fit_levels] or [r for r in report.rows if not r.failed]
    h = [r.h for r in report.rows if not r.failed]
    e = [r.l2_error for r in report.rows if not r.failed]
    slope = intercept = None
    if report.fitted_slope is not None and rows:
        x = np.log([r.h for r in rows])
        y = np.log([r.l2_error for r in rows])
        slope = report.fitted_slope
        intercept = float(np.mean(y - slope * x))
    target = report.config.target.get("family", "target")
    return loglog_svg(h, e, slope, intercept, report.predicted_rate, title=f"{target}: L2 error vs h")
