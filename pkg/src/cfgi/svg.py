"""Self-contained SVG heatmaps for sweep grids. No plotting dependency."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = ["svg_heatmap", "write_svg_heatmap"]

# Three-stop colormap, dark blue -> teal -> yellow.
_STOPS = ((13, 8, 135), (33, 145, 140), (253, 231, 37))

CELL = 14
MARGIN_LEFT = 58
MARGIN_TOP = 34
MARGIN_BOTTOM = 46
MARGIN_RIGHT = 16


def _color(u: float) -> str:
    u = min(max(u, 0.0), 1.0)
    if u <= 0.5:
        lo, hi, frac = _STOPS[0], _STOPS[1], u * 2.0
    else:
        lo, hi, frac = _STOPS[1], _STOPS[2], (u - 0.5) * 2.0
    rgb = [round(a + (b - a) * frac) for a, b in zip(lo, hi)]
    return f"#{rgb[0]:02x}{rgb[1]:02x}{rgb[2]:02x}"


def svg_heatmap(
    values: np.ndarray,
    row_labels: Sequence[object],
    col_labels: Sequence[object],
    title: str,
    row_axis: str = "",
    col_axis: str = "",
) -> str:
    """Render a numeric grid as an SVG heatmap string.

    Non-finite cells (divergent ratios) are drawn hatched gray and excluded
    from the color scale.
    """
    grid = np.asarray(values, dtype=float)
    if grid.ndim != 2:
        raise ValueError(f"expected a 2D grid, got shape {grid.shape}")
    rows, cols = grid.shape
    if rows != len(row_labels) or cols != len(col_labels):
        raise ValueError("label counts do not match grid shape")
    finite = grid[np.isfinite(grid)]
    lo = float(finite.min()) if finite.size else 0.0
    hi = float(finite.max()) if finite.size else 1.0
    span = hi - lo
    width = MARGIN_LEFT + cols * CELL + MARGIN_RIGHT
    height = MARGIN_TOP + rows * CELL + MARGIN_BOTTOM
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:g}" y="18" font-family="sans-serif" font-size="13" '
        f'text-anchor="middle">{title}</text>',
    ]
    for r in range(rows):
        cy = MARGIN_TOP + r * CELL
        for c in range(cols):
            cx = MARGIN_LEFT + c * CELL
            v = grid[r, c]
            if math.isfinite(v):
                fill = _color((v - lo) / span) if span > 0.0 else _color(0.5)
                out.append(f'<rect x="{cx}" y="{cy}" width="{CELL}" height="{CELL}" '
                           f'fill="{fill}"><title>{v:.6g}</title></rect>')
            else:
                out.append(f'<rect x="{cx}" y="{cy}" width="{CELL}" height="{CELL}" '
                           f'fill="#bbbbbb"><title>divergent</title></rect>')
                out.append(f'<line x1="{cx}" y1="{cy}" x2="{cx + CELL}" y2="{cy + CELL}" '
                           f'stroke="#666666" stroke-width="1"/>')
    label_step = max(1, cols // 16)
    for c in range(0, cols, label_step):
        x = MARGIN_LEFT + c * CELL + CELL / 2
        y = MARGIN_TOP + rows * CELL + 13
        out.append(f'<text x="{x:g}" y="{y}" font-family="sans-serif" font-size="9" '
                   f'text-anchor="middle">{col_labels[c]}</text>')
    for r in range(rows):
        x = MARGIN_LEFT - 6
        y = MARGIN_TOP + r * CELL + CELL / 2 + 3
        out.append(f'<text x="{x}" y="{y:g}" font-family="sans-serif" font-size="9" '
                   f'text-anchor="end">{row_labels[r]}</text>')
    if row_axis:
        out.append(f'<text x="14" y="{MARGIN_TOP + rows * CELL / 2:g}" '
                   f'font-family="sans-serif" font-size="11" text-anchor="middle" '
                   f'transform="rotate(-90 14 {MARGIN_TOP + rows * CELL / 2:g})">{row_axis}</text>')
    if col_axis:
        out.append(f'<text x="{MARGIN_LEFT + cols * CELL / 2:g}" '
                   f'y="{MARGIN_TOP + rows * CELL + 28}" font-family="sans-serif" '
                   f'font-size="11" text-anchor="middle">{col_axis}</text>')
    out.append(f'<text x="{MARGIN_LEFT:g}" y="{height - 8}" font-family="sans-serif" '
               f'font-size="10">min {lo:.6g}   max {hi:.6g}</text>')
    out.append("</svg>")
    return "\n".join(out)


def write_svg_heatmap(path: str | Path, values: np.ndarray,
                      row_labels: Sequence[object], col_labels: Sequence[object],
                      title: str, row_axis: str = "", col_axis: str = "") -> None:
    Path(path).write_text(
        svg_heatmap(values, row_labels, col_labels, title, row_axis, col_axis),
        encoding="ascii")
