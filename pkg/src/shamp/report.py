"""CSV tables and minimal log-log SVG charts for experiment results."""
import math
from pathlib import Path

import numpy as np

from . import __version__

# experiment -> (x column, y columns, group column)
CHARTS = {
    "kernel-norms": ("epsilon", ("l2_hgamma_sq", "kgamma_sq", "linf_q_first"), None),
    "convolution-error": ("epsilon", ("median_error", "q90_error", "kernel_bound"), None),
    "full-approximation": ("epsilon", ("median_total", "E_det", "median_total_minus_E_det",
                                       "e_term_sup"), None),
    "attractivity": ("epsilon", ("E_det",), None),
    "l-probe": ("L", ("rms_sup", "rms_over_sqrt_log_L"), None),
    "semigroup-probe": ("t", ("max_ratio",), "epsilon"),
}

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def format_value(v):
    """Round-trip text for CSV cells (17 significant digits for floats)."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    s = str(v)
    if any(c in s for c in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


def csv_text(result, anchor=""):
    prov = result.provenance
    lines = [
        f"# experiment: {result.name}",
        f"# anchor: {anchor}",
        f"# config_hash: {prov.get('config_hash', '')}",
        f"# seed: {prov.get('seed', '')}",
        f"# version: shamp {prov.get('version', __version__)}",
        ",".join(result.columns),
    ]
    for row in result.rows:
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(result, out_dir, anchor=""):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{result.name}.csv"
    path.write_text(csv_text(result, anchor), encoding="utf-8", newline="\n")
    return path


def _series(result):
    spec = CHARTS.get(result.name)
    if spec is None:
        return None
    xcol, ycols, group = spec
    xi = result.columns.index(xcol)
    groups = {}
    for row in result.rows:
        key = row[result.columns.index(group)] if group else None
        groups.setdefault(key, []).append(row)
    series = []
    for key, rows in groups.items():
        for yc in ycols:
            yi = result.columns.index(yc)
            pts = sorted((float(r[xi]), float(r[yi])) for r in rows)
            pts = [(x, y) for x, y in pts if x > 0 and y > 0 and math.isfinite(y)]
            if len(pts) >= 2:
                label = yc if key is None else f"{yc} ({group}={format_value(key)})"
                series.append((label, pts))
    return xcol, series


def _log_range(vals):
    lo, hi = math.log10(min(vals)), math.log10(max(vals))
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def svg_text(title, xlabel, series, width=640, height=420):
    """Log-log line chart: one polyline per ``(label, [(x, y), ...])`` series."""
    ml, mr, mt, mb = 70, 20, 40, 110
    xs = [x for _, pts in series for x, _ in pts]
    ys = [y for _, pts in series for _, y in pts]
    x0, x1 = _log_range(xs)
    y0, y1 = _log_range(ys)
    pw, ph = width - ml - mr, height - mt - mb

    def px(x):
        return ml + (math.log10(x) - x0) / (x1 - x0) * pw

    def py(y):
        return mt + ph - (math.log10(y) - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="13">{title}</text>',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for lo, hi, axis in ((x0, x1, "x"), (y0, y1, "y")):
        for d in range(math.ceil(lo), math.floor(hi) + 1):
            if axis == "x":
                x = px(10.0**d)
                out.append(f'<line x1="{x:.1f}" y1="{mt}" x2="{x:.1f}" y2="{mt + ph}" stroke="#ddd"/>')
                out.append(f'<text x="{x:.1f}" y="{mt + ph + 14}" text-anchor="middle">1e{d}</text>')
            else:
                y = py(10.0**d)
                out.append(f'<line x1="{ml}" y1="{y:.1f}" x2="{ml + pw}" y2="{y:.1f}" stroke="#ddd"/>')
                out.append(f'<text x="{ml - 4}" y="{y + 4:.1f}" text-anchor="end">1e{d}</text>')
    out.append(f'<text x="{ml + pw / 2:.1f}" y="{mt + ph + 30}" text-anchor="middle">{xlabel} (log)</text>')
    for i, (label, pts) in enumerate(series):
        c = COLORS[i % len(COLORS)]
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{c}" stroke-width="1.5"/>')
        for x, y in pts:
            out.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="2.5" fill="{c}"/>')
        ly = mt + ph + 48 + 14 * (i % 4)
        lx = ml + (i // 4) * 300
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" stroke="{c}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 24}" y="{ly}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(result, out_dir):
    """Write ``<name>.svg`` when the experiment has a chart; never raises on
    plotting problems (returns None instead)."""
    try:
        spec = _series(result)
        if not spec or not spec[1]:
            return None
        xcol, series = spec
        path = Path(out_dir) / f"{result.name}.svg"
        path.write_text(svg_text(result.name, xcol, series), encoding="utf-8", newline="\n")
        return path
    except (ValueError, OSError, ZeroDivisionError):
        return None
