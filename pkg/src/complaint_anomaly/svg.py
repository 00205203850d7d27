"""Small SVG writer for scatter panels with fixed axis ranges."""

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 800, 600
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _num(v):
    return f"{v:.2f}".rstrip("0").rstrip(".")


def nice_ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 10))
        t += step
    return ticks


@dataclass
class Series:
    x: list
    y: list
    label: str = ""
    kind: str = "points"  # or "line"
    color: str | None = None


@dataclass
class Panel:
    title: str
    x_range: tuple
    y_range: tuple
    series: list = field(default_factory=list)
    xlabel: str = ""
    ylabel: str = ""


def _panel_svg(panel, ox, oy, w, h, clip_id):
    left, right, top, bottom = 60, 15, 30, 45
    pw, ph = w - left - right, h - top - bottom
    x0, x1 = panel.x_range
    y0, y1 = panel.y_range
    sx = (lambda v: ox + left + (v - x0) / (x1 - x0) * pw) if x1 > x0 else (lambda v: ox + left)
    sy = (lambda v: oy + top + ph - (v - y0) / (y1 - y0) * ph) if y1 > y0 else (lambda v: oy + top + ph)
    px, py = ox + left, oy + top
    parts = [
        f'<g class="panel" data-x-range="{_num(x0)},{_num(x1)}" data-y-range="{_num(y0)},{_num(y1)}">',
        f'<clipPath id="{clip_id}"><rect x="{_num(px)}" y="{_num(py)}" width="{_num(pw)}" height="{_num(ph)}"/></clipPath>',
        f'<rect x="{_num(px)}" y="{_num(py)}" width="{_num(pw)}" height="{_num(ph)}" fill="none" stroke="#333"/>',
        f'<text x="{_num(ox + w / 2)}" y="{_num(oy + 18)}" text-anchor="middle" font-size="13">{escape(panel.title)}</text>',
    ]
    for t in nice_ticks(x0, x1):
        parts.append(f'<line x1="{_num(sx(t))}" y1="{_num(py + ph)}" x2="{_num(sx(t))}" y2="{_num(py + ph + 4)}" stroke="#333"/>')
        parts.append(f'<text x="{_num(sx(t))}" y="{_num(py + ph + 16)}" text-anchor="middle" font-size="10">{_num(t)}</text>')
    for t in nice_ticks(y0, y1):
        parts.append(f'<line x1="{_num(px - 4)}" y1="{_num(sy(t))}" x2="{_num(px)}" y2="{_num(sy(t))}" stroke="#333"/>')
        parts.append(f'<text x="{_num(px - 6)}" y="{_num(sy(t) + 3)}" text-anchor="end" font-size="10">{_num(t)}</text>')
    if panel.xlabel:
        parts.append(f'<text x="{_num(px + pw / 2)}" y="{_num(oy + h - 8)}" text-anchor="middle" font-size="11">{escape(panel.xlabel)}</text>')
    if panel.ylabel:
        cx, cy = ox + 14, py + ph / 2
        parts.append(f'<text x="{_num(cx)}" y="{_num(cy)}" text-anchor="middle" font-size="11" transform="rotate(-90 {_num(cx)} {_num(cy)})">{escape(panel.ylabel)}</text>')

    parts.append(f'<g clip-path="url(#{clip_id})">')
    for k, s in enumerate(panel.series):
        color = s.color or PALETTE[k % len(PALETTE)]
        pts = [(a, b) for a, b in zip(s.x, s.y) if math.isfinite(a) and math.isfinite(b)]
        if s.kind == "line":
            coords = " ".join(f"{_num(sx(a))},{_num(sy(b))}" for a, b in pts)
            parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        else:
            parts.extend(
                f'<circle cx="{_num(sx(a))}" cy="{_num(sy(b))}" r="2.5" fill="{color}" fill-opacity="0.6"/>'
                for a, b in pts
            )
    parts.append("</g>")

    labelled = [(k, s) for k, s in enumerate(panel.series) if s.label]
    for row, (k, s) in enumerate(labelled):
        color = s.color or PALETTE[k % len(PALETTE)]
        ly = py + 12 + 14 * row
        parts.append(f'<rect x="{_num(px + pw - 110)}" y="{_num(ly - 8)}" width="8" height="8" fill="{color}"/>')
        parts.append(f'<text x="{_num(px + pw - 98)}" y="{_num(ly)}" font-size="10">{escape(s.label)}</text>')
    parts.append("</g>")
    return parts


def render(panels, title="", cols=None):
    """Lay panels out on a grid inside an 800x600 canvas and return SVG text."""
    panels = list(panels)
    if not panels:
        raise ValueError("nothing to plot")
    cols = cols or (1 if len(panels) == 1 else 2)
    rows = math.ceil(len(panels) / cols)
    head = 24 if title else 0
    w, h = WIDTH / cols, (HEIGHT - head) / rows
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{WIDTH / 2}" y="17" text-anchor="middle" font-size="15">{escape(title)}</text>')
    for i, panel in enumerate(panels):
        r, c = divmod(i, cols)
        parts.extend(_panel_svg(panel, c * w, head + r * h, w, h, f"clip{i}"))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
