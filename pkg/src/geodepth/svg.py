"""SVG 1.1 figures: polygon, points, geodesics, bisector traces, geodesic disks."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from . import _kernels as K
from .geodesic import Engine
from .polygon import Instance

COLOR = {"red": "#d62728", "blue": "#1f77b4", None: "#222222"}


def _pts(P) -> str:
    return " ".join(f"{x:.6g},{y:.6g}" for x, y in P)


def disk_cells(e: Engine, center, radius: float, res: int = 160) -> list[tuple]:
    """Row runs (x0, x1, y, h) of grid cells whose centers lie in the geodesic disk."""
    poly = e.polygon
    lo, hi = poly.vertices.min(axis=0), poly.vertices.max(axis=0)
    h = float((hi - lo).max()) / res
    xs = lo[0] + h * (np.arange(int(np.ceil((hi[0] - lo[0]) / h))) + 0.5)
    ys = lo[1] + h * (np.arange(int(np.ceil((hi[1] - lo[1]) / h))) + 0.5)
    X, Y = np.meshgrid(xs, ys)
    Q = np.c_[X.ravel(), Y.ravel()]
    ins = np.array([K.inside_closed(x, y, e.E, 0.0) for x, y in Q])
    d = np.full(len(Q), np.inf)
    if ins.any():
        d[ins] = e.distances(Q[ins], e.prepare([center]))[:, 0]
    inside = (d <= radius).reshape(X.shape)
    runs = []
    for r, y in enumerate(ys):
        row = inside[r]
        k = 0
        while k < len(row):
            if row[k]:
                j = k
                while j + 1 < len(row) and row[j + 1]:
                    j += 1
                runs.append((xs[k] - h / 2, xs[j] + h / 2, y - h / 2, h))
                k = j + 1
            else:
                k += 1
    return runs


def figure(inst: Instance, e: Engine, geodesics=(), traces=(), disks=(), transitions=(),
           width: int = 800, title: str | None = None) -> str:
    """geodesics: GeodesicPath objects; traces: BisectorTrace objects;
    disks: (center, radius) pairs; transitions: (center, radius) disks drawn
    as outlines of their cells."""
    V = inst.polygon.vertices
    lo, hi = V.min(axis=0), V.max(axis=0)
    span = float((hi - lo).max())
    pad = 0.04 * span
    vx, vy = lo[0] - pad, lo[1] - pad
    vw, vh = hi[0] - lo[0] + 2 * pad, hi[1] - lo[1] + 2 * pad
    height = int(round(width * vh / vw))
    sw = span / 500
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="{vx:.6g} {vy:.6g} {vw:.6g} {vh:.6g}">',
    ]
    if title:
        out.append(f"<title>{escape(title)}</title>")
    # flip y so the figure reads like the plane
    out.append(f'<g transform="translate(0,{2 * vy + vh:.6g}) scale(1,-1)">')
    out.append(f'<polygon class="polygon" points="{_pts(V)}" fill="#f4f4f0" stroke="#333" '
               f'stroke-width="{2 * sw:.4g}"/>')
    for c, r in disks:
        out.append('<g class="disk" fill="#2ca02c" fill-opacity="0.18">')
        for x0, x1, y, h in disk_cells(e, c, r):
            out.append(f'<rect x="{x0:.6g}" y="{y:.6g}" width="{x1 - x0:.6g}" height="{h:.6g}"/>')
        out.append("</g>")
    for c, r in transitions:
        out.append(f'<g class="transition-disk" fill="none" stroke="#9467bd" stroke-width="{sw:.4g}">')
        for x0, x1, y, h in disk_cells(e, c, r, res=100):
            out.append(f'<rect x="{x0:.6g}" y="{y:.6g}" width="{x1 - x0:.6g}" height="{h:.6g}"/>')
        out.append("</g>")
    for g in geodesics:
        out.append(f'<polyline class="geodesic" points="{_pts(g.points)}" fill="none" stroke="#ff7f0e" '
                   f'stroke-width="{1.5 * sw:.4g}"/>')
    for tr in traces:
        out.append(f'<polyline class="bisector" points="{_pts(tr.points)}" fill="none" stroke="#8c564b" '
                   f'stroke-width="{1.5 * sw:.4g}" stroke-dasharray="{4 * sw:.4g},{2 * sw:.4g}"/>')
    cols = inst.colors if inst.colored else (None,) * inst.n
    for k, (p, col) in enumerate(zip(inst.points, cols)):
        out.append(f'<circle class="point" id="p{k}" cx="{p[0]:.6g}" cy="{p[1]:.6g}" r="{3 * sw:.4g}" '
                   f'fill="{COLOR[col]}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
