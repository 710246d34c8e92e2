"""Static SVG rendering of a map, its zones and a planned path.

Output is byte-stable: coordinates are printed with a fixed number of
decimals and elements are emitted in a fixed order.  Maps with three or more
dimensions are projected onto their first two axes.
"""
from __future__ import annotations

import numpy as np

from ..geometry import Ball, WorldMap

__all__ = ["emit_svg"]

_STYLE = {
    "zone": 'fill="none" stroke="#9aa5b1" stroke-width="{w}"',
    "edge": 'stroke="#3e8ed0" stroke-width="{w}" stroke-dasharray="{d}"',
    "obstacle": 'fill="#52606d" fill-opacity="0.85"',
    "path": 'fill="none" stroke="#d64545" stroke-width="{w}"',
    "subgoal": 'fill="#f0b429"',
    "start": 'fill="#27ab83"',
    "goal": 'fill="#a368fc"',
}


def emit_svg(world: WorldMap, path=None, decomposition=None, graph=None, width: int = 800,
             precision: int = 2) -> str:
    """SVG document text.  ``path`` may be a ``Path`` or an array of waypoints."""
    lo = world.bounds.min_corner[:2]
    hi = world.bounds.max_corner[:2]
    span = hi - lo
    scale = width / span[0]
    height = span[1] * scale
    fmt = f"{{:.{precision}f}}"

    def num(v) -> str:
        s = fmt.format(float(v))
        return "0" if s.lstrip("-").strip("0.") == "" else s

    def xy(p):
        # flip y so the second axis points up
        return num((p[0] - lo[0]) * scale), num((hi[1] - p[1]) * scale)

    line_w = num(max(width / 800.0, 0.5))
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{num(width)}" height="{num(height)}" '
        f'viewBox="0 0 {num(width)} {num(height)}">',
        f'<rect x="0" y="0" width="{num(width)}" height="{num(height)}" fill="#ffffff" stroke="#1f2933"/>',
    ]

    if decomposition is not None:
        out.append('<g id="zones">')
        for z in decomposition.zones:
            x0, y1 = xy(z.cell.min_corner)
            x1, y0 = xy(z.cell.max_corner)
            w = num(float(x1) - float(x0))
            h = num(float(y1) - float(y0))
            out.append(f'<rect x="{x0}" y="{y0}" width="{w}" height="{h}" '
                       + _STYLE["zone"].format(w=line_w) + "/>")
        out.append("</g>")
        if graph is not None:
            out.append('<g id="graph">')
            for i, j in sorted(graph.edges):
                (ax, ay), (bx, by) = xy(decomposition.zones[i].center), xy(decomposition.zones[j].center)
                out.append(f'<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}" '
                           + _STYLE["edge"].format(w=line_w, d=num(4 * float(line_w))) + "/>")
            out.append("</g>")

    out.append('<g id="obstacles">')
    for o in world.obstacles:
        if isinstance(o, Ball):
            cx, cy = xy(o.center)
            out.append(f'<circle cx="{cx}" cy="{cy}" r="{num(o.radius * scale)}" {_STYLE["obstacle"]}/>')
        else:
            x0, y1 = xy(o.min_corner)
            x1, y0 = xy(o.max_corner)
            out.append(f'<rect x="{x0}" y="{y0}" width="{num(float(x1) - float(x0))}" '
                       f'height="{num(float(y1) - float(y0))}" {_STYLE["obstacle"]}/>')
    out.append("</g>")

    marker = num(max(3.0, width / 160.0))
    if path is not None:
        pts = np.asarray(getattr(path, "waypoints", path), dtype=float)
        if len(pts):
            coords = " ".join(",".join(xy(p)) for p in pts)
            out.append(f'<polyline id="path" points="{coords}" ' + _STYLE["path"].format(w=num(2 * float(line_w))) + "/>")
        for s in getattr(path, "subgoals", None) or []:
            cx, cy = xy(s)
            out.append(f'<circle cx="{cx}" cy="{cy}" r="{marker}" {_STYLE["subgoal"]}/>')

    for name, p in (("start", world.start), ("goal", world.goal)):
        cx, cy = xy(p)
        out.append(f'<circle id="{name}" cx="{cx}" cy="{cy}" r="{marker}" {_STYLE[name]}/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
