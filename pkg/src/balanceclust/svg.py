"""Deterministic SVG scatter plots of points, boundaries and regenerated clusters."""
from __future__ import annotations

import warnings

import numpy as np

from .boundary import BoundarySet

PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]
NOISE_COLOR = "#c8c8c8"


def _xy(a, warn=True):
    a = np.asarray(a, dtype=np.float64)
    if a.size == 0:
        return np.zeros((0, 2))
    if a.shape[1] > 2:
        if warn:
            warnings.warn(f"{a.shape[1]}-D input projected onto its first two coordinates", stacklevel=3)
        return a[:, :2]
    if a.shape[1] == 1:
        return np.column_stack([a[:, 0], np.zeros(len(a))])
    return a


def render_svg(points=None, labels=None, boundaries=(), regenerated=(), draw_balance: bool = False,
               size: int = 640, margin: int = 20, title: str | None = None) -> str:
    """SVG document for the given layers (every argument optional).

    ``boundaries`` is a sequence of :class:`BoundarySet`; boundary points are
    drawn as larger black-ringed dots, and with ``draw_balance`` a short
    segment shows each balance vector. ``regenerated`` is a sequence of point
    arrays, drawn as crosses.
    """
    pts = _xy(points if points is not None else np.zeros((0, 2)))
    bsets = [b for b in boundaries if len(b)]
    bpts = [_xy(b.points) for b in bsets]
    regen = [_xy(r) for r in regenerated if len(r)]
    everything = [a for a in [pts, *bpts, *regen] if len(a)]
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<rect width="{size}" height="{size}" fill="white"/>']
    if title:
        lines.append(f'<title>{title}</title>')
    if not everything:
        lines.append("</svg>")
        return "\n".join(lines) + "\n"

    allp = np.concatenate(everything)
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    scale = (size - 2 * margin) / span

    def tx(a):
        x = margin + (a[:, 0] - lo[0]) * scale
        y = size - margin - (a[:, 1] - lo[1]) * scale
        return x, y

    def color(k):
        return NOISE_COLOR if k < 0 else PALETTE[k % len(PALETTE)]

    if len(pts):
        labs = np.zeros(len(pts), dtype=int) if labels is None else np.asarray(labels, dtype=int)
        x, y = tx(pts)
        lines.append('<g id="points" stroke="none">')
        lines += [f'<circle cx="{a:.2f}" cy="{b:.2f}" r="1.5" fill="{color(k)}"/>' for a, b, k in zip(x, y, labs)]
        lines.append("</g>")
    for r_i, r in enumerate(regen):
        x, y = tx(r)
        lines.append(f'<g id="regenerated-{r_i}" stroke="{color(r_i)}" stroke-width="0.8">')
        lines += [f'<path d="M{a - 2:.2f} {b - 2:.2f}L{a + 2:.2f} {b + 2:.2f}M{a - 2:.2f} {b + 2:.2f}L{a + 2:.2f} {b - 2:.2f}"/>'
                  for a, b in zip(x, y)]
        lines.append("</g>")
    for b_i, (b, xy) in enumerate(zip(bsets, bpts)):
        x, y = tx(xy)
        lines.append(f'<g id="boundary-{b_i}" class="boundary" stroke="black" stroke-width="0.6">')
        lines += [f'<circle cx="{a:.2f}" cy="{c:.2f}" r="2.6" fill="{color(int(k))}"/>'
                  for a, c, k in zip(x, y, b.source_cluster)]
        if draw_balance:
            tip = 12.0
            v = _xy(b.balances, warn=False)
            lines += [f'<line x1="{a:.2f}" y1="{c:.2f}" x2="{a + tip * u:.2f}" y2="{c - tip * w:.2f}" stroke="#0000ff"/>'
                      for a, c, (u, w) in zip(x, y, v)]
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
