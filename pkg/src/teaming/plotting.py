"""Minimal SVG line charts.

Every polyline carries ``data-source`` and ``data-column`` attributes naming
the CSV file and column it was drawn from.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape, quoteattr

WIDTH, HEIGHT = 480, 320
MARGIN = dict(left=64, right=16, top=32, bottom=48)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


def _ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def line_chart(series, title, xlabel, ylabel, source, logx=False, description=""):
    """Render ``series`` to an SVG string.

    Each series is ``(label, column, xs, ys)`` or ``(label, column, xs, ys,
    source)``; without its own ``source`` a series inherits the chart-level one.
    """
    series = [tuple(s) if len(s) == 5 else (*s, source) for s in series]
    tx = (lambda v: math.log10(v)) if logx else (lambda v: v)
    xs_all = [tx(x) for _, _, xs, _, _ in series for x in xs]
    ys_all = [y for _, _, _, ys, _ in series for y in ys if math.isfinite(y)]
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return MARGIN["left"] + (tx(x) - x0) / ((x1 - x0) or 1.0) * pw

    def py(y):
        return MARGIN["top"] + (1 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f"<title>{escape(title)}</title>",
    ]
    if description:
        out.append(f"<desc>{escape(description)}</desc>")
    out.append(f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>')
    for v in _ticks(y0 + pad, y1 - pad):
        y = py(v)
        out.append(f'<line x1="{MARGIN["left"] - 4}" y1="{y:.2f}" x2="{MARGIN["left"]}" y2="{y:.2f}" stroke="#444"/>')
        out.append(f'<text x="{MARGIN["left"] - 6}" y="{y + 4:.2f}" text-anchor="end">{v:.4g}</text>')
    for v in _ticks(x0, x1):
        x = MARGIN["left"] + (v - x0) / ((x1 - x0) or 1.0) * pw
        label = 10 ** v if logx else v
        out.append(f'<line x1="{x:.2f}" y1="{HEIGHT - MARGIN["bottom"]}" x2="{x:.2f}" y2="{HEIGHT - MARGIN["bottom"] + 4}" stroke="#444"/>')
        out.append(f'<text x="{x:.2f}" y="{HEIGHT - MARGIN["bottom"] + 16}" text-anchor="middle">{label:.3g}</text>')
    out.append(f'<text x="{WIDTH / 2}" y="{HEIGHT - 8}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="14" y="{HEIGHT / 2}" text-anchor="middle" transform="rotate(-90 14 {HEIGHT / 2})">{escape(ylabel)}</text>'
    )
    out.append(f'<text x="{WIDTH / 2}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>')
    for k, (label, column, xs, ys, src) in enumerate(series):
        color = COLORS[k % len(COLORS)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys) if math.isfinite(y))
        out.append(
            f"<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" "
            f"data-source={quoteattr(src)} data-column={quoteattr(column)} points=\"{pts}\"/>"
        )
        ly = MARGIN["top"] + 14 + 14 * k
        lx = WIDTH - MARGIN["right"] - 120
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 16}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f"<text x=\"{lx + 20}\" y=\"{ly}\">{escape(label)}</text>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
