"""Standalone SVG scatter plots with no plotting library."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 480
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 20, 20, 55
POINT_FILL = "#4c72b0"
HIGHLIGHT_FILL = "#d62728"


def _extent(values: Sequence[float]) -> tuple[float, float]:
    if not values:
        return 0.0, 1.0
    lo, hi = min(values), max(values)
    span = hi - lo
    if span == 0:
        span = abs(lo) if lo else 1.0
        lo, hi = lo - 0.5 * span, hi + 0.5 * span
        span = hi - lo
    return lo - 0.05 * span, hi + 0.05 * span


def _num(v: float) -> str:
    return f"{v:.2f}"


def svg_scatter(points: Sequence[tuple[float, float]], x_label: str, y_label: str,
                highlight: Iterable[int] = (), title: str = "") -> str:
    """SVG text for a scatter plot; ``highlight`` holds indices drawn in a distinct fill."""
    xs = [float(p[0]) for p in points]
    ys = [float(p[1]) for p in points]
    x0, x1 = _extent(xs)
    y0, y1 = _extent(ys)
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    left, bottom = MARGIN_LEFT, HEIGHT - MARGIN_BOTTOM

    def sx(x):
        return left + (x - x0) / (x1 - x0) * plot_w

    def sy(y):
        return bottom - (y - y0) / (y1 - y0) * plot_h

    hl = set(highlight)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<title>{escape(title)}</title>')
    out += [
        f'<line class="axis" x1="{left}" y1="{bottom}" x2="{left + plot_w}" y2="{bottom}" stroke="black"/>',
        f'<line class="axis" x1="{left}" y1="{bottom}" x2="{left}" y2="{MARGIN_TOP}" stroke="black"/>',
        f'<text x="{left}" y="{bottom + 18}" font-size="11" text-anchor="start">{_num(x0)}</text>',
        f'<text x="{left + plot_w}" y="{bottom + 18}" font-size="11" text-anchor="end">{_num(x1)}</text>',
        f'<text x="{left - 6}" y="{bottom}" font-size="11" text-anchor="end">{_num(y0)}</text>',
        f'<text x="{left - 6}" y="{MARGIN_TOP + 10}" font-size="11" text-anchor="end">{_num(y1)}</text>',
        f'<text x="{left + plot_w / 2:.2f}" y="{HEIGHT - 12}" font-size="13" '
        f'text-anchor="middle">{escape(x_label)}</text>',
        f'<text x="18" y="{MARGIN_TOP + plot_h / 2:.2f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 18 {MARGIN_TOP + plot_h / 2:.2f})">{escape(y_label)}</text>',
    ]
    # highlighted points last so they sit on top
    order = [i for i in range(len(points)) if i not in hl] + [i for i in range(len(points)) if i in hl]
    for i in order:
        cls, fill = ("highlight", HIGHLIGHT_FILL) if i in hl else ("point", POINT_FILL)
        out.append(f'<circle class="{cls}" cx="{sx(xs[i]):.2f}" cy="{sy(ys[i]):.2f}" r="4" fill="{fill}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg_scatter(path, points, x_label: str, y_label: str, highlight: Iterable[int] = (),
                     title: str = "") -> None:
    Path(path).write_text(svg_scatter(points, x_label, y_label, highlight, title), encoding="utf-8", newline="\n")
