"""Minimal deterministic SVG charts.

Only what the experiments need: scatter series drawn as stars, rings or dots,
and polylines for fitted curves, on linear or base-10 log axes.  Numbers are
printed with a fixed number of decimals, so identical inputs give identical
bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

from .errors import EmptyError

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=20, top=40, bottom=55)
COLORS = ("#1f4e9c", "#b2182b", "#2b8a3e", "#7b3294", "#e08214", "#4d4d4d")


@dataclass
class PlotSeries:
    name: str
    x: np.ndarray
    y: np.ndarray
    marker: str = "dots"  # stars | rings | dots | line
    color: str | None = None

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)


@dataclass
class PlotStyle:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    logx: bool = False
    logy: bool = False
    extra: dict = field(default_factory=dict)


def _n(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        return [10.0**e for e in range(math.floor(lo), math.ceil(hi) + 1) if lo - 1e-9 <= e <= hi + 1e-9]
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / 5
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=mag)
    first = math.ceil(lo / step) * step
    out, v = [], first
    while v <= hi + step * 1e-9:
        out.append(0.0 if abs(v) < step * 1e-9 else v)
        v += step
    return out


def _label(v: float) -> str:
    if v != 0 and (abs(v) >= 1e4 or abs(v) < 1e-3):
        return f"{v:.0e}"
    return f"{v:.6g}"


def _star(cx: float, cy: float, r: float) -> str:
    pts = []
    for i in range(10):
        rad = r if i % 2 == 0 else r * 0.45
        ang = -math.pi / 2 + i * math.pi / 5
        pts.append(f"{_n(cx + rad * math.cos(ang))},{_n(cy + rad * math.sin(ang))}")
    return " ".join(pts)


def render_svg(series: list[PlotSeries], style: PlotStyle = PlotStyle()) -> str:
    """SVG document text for the given series."""
    usable = []
    for s in series:
        keep = np.isfinite(s.x) & np.isfinite(s.y)
        if style.logx:
            keep &= s.x > 0
        if style.logy:
            keep &= s.y > 0
        if keep.any():
            usable.append((s, s.x[keep], s.y[keep]))
    if not usable:
        raise EmptyError("nothing to plot")

    def tx(v):
        return np.log10(v) if style.logx else v

    def ty(v):
        return np.log10(v) if style.logy else v

    xs = np.concatenate([tx(x) for _, x, _ in usable])
    ys = np.concatenate([ty(y) for _, _, y in usable])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad_y = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad_y, y1 + pad_y
    left, top = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return left + (v - x0) / (x1 - x0) * pw

    def py(v):
        return top + ph - (v - y0) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if style.title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(style.title)}</text>')
    out.append('<g class="ticks">')
    for t in _ticks(x0, x1, style.logx):
        pos = px(math.log10(t) if style.logx else t)
        out.append(f'<line x1="{_n(pos)}" y1="{top + ph}" x2="{_n(pos)}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_n(pos)}" y="{top + ph + 18}" text-anchor="middle">{_label(t)}</text>')
    for t in _ticks(y0, y1, style.logy):
        pos = py(math.log10(t) if style.logy else t)
        out.append(f'<line x1="{left - 5}" y1="{_n(pos)}" x2="{left}" y2="{_n(pos)}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{_n(pos + 4)}" text-anchor="end">{_label(t)}</text>')
    out.append("</g>")
    if style.xlabel:
        out.append(f'<text x="{left + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(style.xlabel)}</text>')
    if style.ylabel:
        out.append(
            f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" '
            f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(style.ylabel)}</text>'
        )
    for i, (s, x, y) in enumerate(usable):
        color = s.color or COLORS[i % len(COLORS)]
        X, Y = px(tx(x)), py(ty(y))
        out.append(f'<g class="series {s.marker}" data-name="{escape(s.name)}">')
        if s.marker == "line":
            pts = " ".join(f"{_n(a)},{_n(b)}" for a, b in zip(X, Y))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        elif s.marker == "stars":
            for a, b in zip(X, Y):
                out.append(f'<polygon points="{_star(a, b, 5.0)}" fill="{color}"/>')
        elif s.marker == "rings":
            for a, b in zip(X, Y):
                out.append(f'<circle cx="{_n(a)}" cy="{_n(b)}" r="4.00" fill="none" stroke="{color}"/>')
        else:
            for a, b in zip(X, Y):
                out.append(f'<circle cx="{_n(a)}" cy="{_n(b)}" r="2.50" fill="{color}"/>')
        out.append("</g>")
    ly = top + 14
    for i, (s, _, _) in enumerate(usable):
        color = s.color or COLORS[i % len(COLORS)]
        out.append(
            f'<text x="{left + pw - 8}" y="{ly + 16 * i}" text-anchor="end" fill="{color}">{escape(s.name)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(series: list[PlotSeries], style: PlotStyle, path=None) -> str:
    """Render and optionally write an SVG; returns the text."""
    text = render_svg(series, style)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
