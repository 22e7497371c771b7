"""SVG drawing of a layered graph.

Layer 1 is the top row.  Every arc is one polyline that passes through a
dummy point on each layer strictly between its ends; reversed arcs are drawn
thick and dashed.  The order inside a layer comes from a few alternating
barycenter sweeps that start from vertex-id order.  This is a readable
preview, not a crossing-minimising or coordinate-assigning layout phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .graph import DiGraph
from .layering import InvalidLayering, Layering, validate

__all__ = ["RenderOptions", "render_svg"]


@dataclass(frozen=True)
class RenderOptions:
    layer_spacing: float = 80.0
    vertex_spacing: float = 60.0
    vertex_radius: float = 14.0
    sweeps: int = 4
    show_dummies: bool = True
    margin: float = 30.0
    arrow_size: float = 8.0

    def __post_init__(self):
        for name in ("layer_spacing", "vertex_spacing", "vertex_radius", "margin", "arrow_size"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.sweeps < 0:
            raise ValueError("sweeps must be non-negative")


def _fmt(x: float) -> str:
    x = round(x, 2)
    if x == int(x):
        return str(int(x))
    return f"{x:.2f}".rstrip("0")


def _chains(g: DiGraph, lay: Layering):
    """Per arc, the node keys it visits from tail to head; nodes are ("v", id) or ("d", arc, layer)."""
    chains = []
    for a, (u, v) in enumerate(g.arcs):
        lu, lv = lay[u], lay[v]
        step = 1 if lv > lu else -1
        chain = [("v", u)] + [("d", a, k) for k in range(lu + step, lv, step)] + [("v", v)]
        chains.append(chain)
    return chains


def _order_layers(g: DiGraph, lay: Layering, chains, sweeps: int):
    H = lay.height
    layer_of = {}
    rows: list[list] = [[] for _ in range(H + 1)]
    for v in range(g.n):
        key = ("v", v)
        layer_of[key] = lay[v]
        rows[lay[v]].append(key)
    for chain in chains:
        for key in chain[1:-1]:
            layer_of[key] = key[2]
            rows[key[2]].append(key)
    up: dict = {key: [] for key in layer_of}
    down: dict = {key: [] for key in layer_of}
    for chain in chains:
        for p, q in zip(chain, chain[1:]):
            if layer_of[p] > layer_of[q]:
                p, q = q, p
            down[p].append(q)
            up[q].append(p)

    def sweep(ks, neighbours):
        for k in ks:
            pos = {key: i for i, key in enumerate(rows[k - 1 if neighbours is up else k + 1])}
            current = {key: i for i, key in enumerate(rows[k])}

            def bary(key):
                ns = neighbours[key]
                if not ns:
                    return current[key]
                return sum(pos[x] for x in ns) / len(ns)

            rows[k].sort(key=lambda key: (bary(key), current[key]))

    for i in range(sweeps):
        if i % 2 == 0:
            sweep(range(2, H + 1), up)
        else:
            sweep(range(H - 1, 0, -1), down)
    return rows


def _arrow(x1, y1, x2, y2, size):
    """Two line segments forming an arrowhead at (x2, y2) for a segment from (x1, y1)."""
    angle = math.atan2(y2 - y1, x2 - x1)
    out = []
    for side in (-1, 1):
        a = angle + math.pi - side * math.pi / 7
        out.append((x2, y2, x2 + size * math.cos(a), y2 + size * math.sin(a)))
    return out


def _trim(p, q, r):
    """Point at distance r from p towards q."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    d = math.hypot(dx, dy)
    if d == 0:
        return p
    return (p[0] + dx * r / d, p[1] + dy * r / d)


def render_svg(g: DiGraph, lay: Layering, opts: RenderOptions | None = None) -> str:
    opts = opts or RenderOptions()
    problems = validate(g, lay)
    if problems:
        raise InvalidLayering(problems)
    chains = _chains(g, lay)
    rows = _order_layers(g, lay, chains, opts.sweeps)
    widest = max((len(r) for r in rows), default=1) or 1
    pad = opts.margin + opts.vertex_radius
    xy = {}
    for k in range(1, lay.height + 1):
        offset = (widest - len(rows[k])) * opts.vertex_spacing / 2
        for i, key in enumerate(rows[k]):
            xy[key] = (pad + offset + i * opts.vertex_spacing, pad + (k - 1) * opts.layer_spacing)
    width = 2 * pad + (widest - 1) * opts.vertex_spacing
    height = 2 * pad + (lay.height - 1) * opts.layer_spacing

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        '<g class="arcs" fill="none" stroke="black">',
    ]
    for a, chain in enumerate(chains):
        u, v = g.arcs[a]
        pts = [xy[key] for key in chain]
        pts[0] = _trim(pts[0], pts[1], opts.vertex_radius)
        pts[-1] = _trim(pts[-1], pts[-2], opts.vertex_radius)
        text = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        if lay[u] > lay[v]:
            style = 'class="arc reversed" stroke-width="3" stroke-dasharray="8,5"'
        else:
            style = 'class="arc" stroke-width="1.5"'
        out.append(f'<polyline {style} data-arc="{a}" points="{text}"/>')
        (x1, y1), (x2, y2) = pts[-2], pts[-1]
        for ax1, ay1, ax2, ay2 in _arrow(x1, y1, x2, y2, opts.arrow_size):
            out.append(
                f'<line class="arrow" stroke-width="1.5" x1="{_fmt(ax1)}" y1="{_fmt(ay1)}" '
                f'x2="{_fmt(ax2)}" y2="{_fmt(ay2)}"/>'
            )
    out.append("</g>")
    if opts.show_dummies:
        out.append('<g class="dummies" fill="gray">')
        for chain in chains:
            for key in chain[1:-1]:
                x, y = xy[key]
                out.append(f'<circle class="dummy" cx="{_fmt(x)}" cy="{_fmt(y)}" r="3"/>')
        out.append("</g>")
    out.append('<g class="vertices" stroke="black" stroke-width="1.5">')
    for v in range(g.n):
        x, y = xy[("v", v)]
        out.append(f'<circle class="vertex" cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(opts.vertex_radius)}" fill="white"/>')
    out.append("</g>")
    out.append('<g class="labels" font-family="sans-serif" font-size="12" text-anchor="middle">')
    for v in range(g.n):
        x, y = xy[("v", v)]
        out.append(f'<text x="{_fmt(x)}" y="{_fmt(y + 4)}">{escape(g.label(v))}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
