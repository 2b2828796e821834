"""SVG drawing of a 2D unit ball and its dual ball."""
from __future__ import annotations

import math

import numpy as np

from .core import REAL
from .errors import Unsupported
from .norms import NormSpec

TRACE_SEGMENTS = 256
SIZE = 400


def ball_boundary(spec: NormSpec) -> np.ndarray:
    """Boundary points in counterclockwise order: the polygon vertices or a trace."""
    if spec.dim != 2 or spec.field != REAL:
        raise Unsupported("ball plots need a real 2D norm")
    verts = spec.ball_vertices() if spec.is_polyhedral else None
    if verts is not None:
        verts = np.asarray(verts, dtype=float)
        ang = np.round(np.arctan2(verts[:, 1], verts[:, 0]) % (2 * math.pi), 12)
        order = np.lexsort((np.linalg.norm(verts, axis=1), ang))
        verts, ang = verts[order], ang[order]
        keep = np.ones(len(verts), dtype=bool)
        keep[1:] = np.diff(ang) > 1e-12
        return verts[keep] + 0.0
    t = 2 * math.pi * np.arange(TRACE_SEGMENTS) / TRACE_SEGMENTS
    u = np.stack([np.cos(t), np.sin(t)], axis=1)
    return u / np.asarray(spec(u))[:, None]


def _path(points, scale):
    return " ".join(f"{x * scale + 0.0:.6f},{-y * scale + 0.0:.6f}" for x, y in points)


def plot_balls(spec: NormSpec, out=None) -> dict:
    """Write an SVG with the unit ball (blue) and, when available, the dual ball (red)."""
    from .duality import polar_dual_spec

    primal = ball_boundary(spec)
    try:
        dual = ball_boundary(polar_dual_spec(spec))
    except Unsupported:
        dual = None
    extent = float(np.abs(primal).max())
    if dual is not None:
        extent = max(extent, float(np.abs(dual).max()))
    scale = 0.45 * SIZE / extent
    half = SIZE / 2
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
             f'viewBox="{-half} {-half} {SIZE} {SIZE}">',
             f'<line x1="{-half}" y1="0" x2="{half}" y2="0" stroke="#bbb" stroke-width="0.5"/>',
             f'<line x1="0" y1="{-half}" x2="0" y2="{half}" stroke="#bbb" stroke-width="0.5"/>',
             f'<polygon id="ball" points="{_path(primal, scale)}" fill="none" '
             f'stroke="#1f4e9c" stroke-width="1.5"/>']
    if dual is not None:
        lines.append(f'<polygon id="dual-ball" points="{_path(dual, scale)}" fill="none" '
                     f'stroke="#b22222" stroke-width="1.5" stroke-dasharray="4 2"/>')
    lines.append("</svg>")
    svg = "\n".join(lines) + "\n"
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(svg)
    return {"svg": svg, "ball": primal, "dual_ball": dual, "scale": scale}
