"""Minimal self-contained SVG charts (no plotting stack).

Just enough for the experiment harness: grouped box plots with Tukey
whiskers (1.5 IQR, points beyond drawn as dots) and multi-series mean
lines. Output is a single standalone SVG file.
"""

from __future__ import annotations

import numpy as np

WIDTH, HEIGHT = 640, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 60, 20, 36, 48
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"]


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
    ]


def _yscale(lo: float, hi: float):
    if hi - lo < 1e-12:
        hi = lo + 1.0
    span = hi - lo
    lo -= 0.05 * span
    hi += 0.05 * span

    def scale(v: float) -> float:
        return MARGIN_T + (HEIGHT - MARGIN_T - MARGIN_B) * (hi - v) / (hi - lo)

    return scale, lo, hi


def _axes(parts: list[str], scale, lo: float, hi: float, ylabel: str) -> None:
    x0, x1 = MARGIN_L, WIDTH - MARGIN_R
    parts.append(
        f'<line x1="{x0}" y1="{scale(lo)}" x2="{x0}" y2="{scale(hi)}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{x0}" y1="{scale(lo)}" x2="{x1}" y2="{scale(lo)}" stroke="black"/>'
    )
    for tick in np.linspace(lo, hi, 6):
        y = scale(tick)
        parts.append(f'<line x1="{x0 - 4}" y1="{y}" x2="{x0}" y2="{y}" stroke="black"/>')
        parts.append(
            f'<text x="{x0 - 8}" y="{y + 4}" text-anchor="end">{tick:.3g}</text>'
        )
    parts.append(
        f'<text x="14" y="{HEIGHT / 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {HEIGHT / 2})">{ylabel}</text>'
    )


def boxplot_svg(groups: dict[str, list[float]], path: str, title: str = "", ylabel: str = "") -> None:
    """One Tukey box per group, keys used as x labels (insertion order)."""
    labels = list(groups)
    all_vals = [v for vals in groups.values() for v in vals]
    scale, lo, hi = _yscale(min(all_vals), max(all_vals))
    parts = _header(title)
    _axes(parts, scale, lo, hi, ylabel)
    span = WIDTH - MARGIN_L - MARGIN_R
    step = span / max(1, len(labels))
    half = min(24.0, step * 0.3)
    for i, label in enumerate(labels):
        vals = np.sort(np.array(groups[label], dtype=float))
        cx = MARGIN_L + step * (i + 0.5)
        q1, med, q3 = (float(np.percentile(vals, p)) for p in (25, 50, 75))
        iqr = q3 - q1
        lo_w = float(vals[vals >= q1 - 1.5 * iqr].min())
        hi_w = float(vals[vals <= q3 + 1.5 * iqr].max())
        parts.append(
            f'<line x1="{cx}" y1="{scale(lo_w)}" x2="{cx}" y2="{scale(q1)}" stroke="black"/>'
        )
        parts.append(
            f'<line x1="{cx}" y1="{scale(q3)}" x2="{cx}" y2="{scale(hi_w)}" stroke="black"/>'
        )
        for w in (lo_w, hi_w):
            parts.append(
                f'<line x1="{cx - half / 2}" y1="{scale(w)}" x2="{cx + half / 2}" y2="{scale(w)}" stroke="black"/>'
            )
        parts.append(
            f'<rect x="{cx - half}" y="{scale(q3)}" width="{2 * half}" '
            f'height="{max(0.5, scale(q1) - scale(q3))}" fill="#9ecae1" stroke="black"/>'
        )
        parts.append(
            f'<line x1="{cx - half}" y1="{scale(med)}" x2="{cx + half}" y2="{scale(med)}" '
            f'stroke="black" stroke-width="2"/>'
        )
        for v in vals[(vals < lo_w) | (vals > hi_w)]:
            parts.append(f'<circle cx="{cx}" cy="{scale(float(v))}" r="2" fill="black"/>')
        parts.append(
            f'<text x="{cx}" y="{HEIGHT - MARGIN_B + 16}" text-anchor="middle">{label}</text>'
        )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def lineplot_svg(
    series: dict[str, tuple[list[float], list[float]]],
    path: str,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
) -> None:
    """Mean lines with point markers; one color per series."""
    xs_all = [x for xs, _ in series.values() for x in xs]
    ys_all = [y for _, ys in series.values() for y in ys]
    scale, lo, hi = _yscale(min(ys_all), max(ys_all))
    x_lo, x_hi = min(xs_all), max(xs_all)
    if x_hi - x_lo < 1e-12:
        x_hi = x_lo + 1.0
    span = WIDTH - MARGIN_L - MARGIN_R

    def xscale(x: float) -> float:
        return MARGIN_L + span * (x - x_lo) / (x_hi - x_lo)

    parts = _header(title)
    _axes(parts, scale, lo, hi, ylabel)
    for x in sorted(set(xs_all)):
        parts.append(
            f'<text x="{xscale(x)}" y="{HEIGHT - MARGIN_B + 16}" text-anchor="middle">{x:g}</text>'
        )
    parts.append(
        f'<text x="{(MARGIN_L + WIDTH - MARGIN_R) / 2}" y="{HEIGHT - 8}" text-anchor="middle">{xlabel}</text>'
    )
    for i, (name, (xs, ys)) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        points = " ".join(f"{xscale(x)},{scale(y)}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="2"/>')
        for x, y in zip(xs, ys):
            parts.append(f'<circle cx="{xscale(x)}" cy="{scale(y)}" r="3" fill="{color}"/>')
        parts.append(
            f'<text x="{WIDTH - MARGIN_R - 6}" y="{MARGIN_T + 14 * (i + 1)}" '
            f'text-anchor="end" fill="{color}">{name}</text>'
        )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
