"""
SVG Rendering

Draws a partition over its body. Cell polygons carry the report's vertex
coordinates verbatim; a group transform maps the body's bounding box onto a
fixed 1000-unit view box with the y axis pointing up.
"""

from typing import List, Optional, Sequence

import numpy as np

from convex_equipart.core.density import DensityField, GridDensity
from convex_equipart.geometry.polygon import ConvexPolygon

VIEWBOX = 1000.0
_MARGIN = 20.0
_PALETTE = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
            "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"]


def _points(poly: ConvexPolygon) -> str:
    return " ".join(f"{x!r},{y!r}" for x, y in poly.vertices.tolist())


def _transform(body: ConvexPolygon) -> str:
    xmin, ymin, xmax, ymax = body.bounding_box
    extent = max(xmax - xmin, ymax - ymin)
    s = (VIEWBOX - 2.0 * _MARGIN) / extent
    tx = _MARGIN - s * xmin
    ty = VIEWBOX - _MARGIN + s * ymin
    return f"matrix({s!r} 0 0 {-s!r} {tx!r} {ty!r})"


def _heatmap(density: GridDensity) -> List[str]:
    peak = float(density.values.max())
    h = density.cell_size
    x0, y0 = density.origin
    rects = []
    for row, col in zip(*(idx.tolist() for idx in np.nonzero(density.values))):
        opacity = float(density.values[row, col]) / peak
        rects.append(
            f'<rect x="{x0 + col * h!r}" y="{y0 + row * h!r}" width="{h!r}" height="{h!r}" '
            f'fill="#000000" fill-opacity="{0.35 * opacity:.4f}"/>')
    return rects


def render_partition(body: ConvexPolygon, cells: Sequence[ConvexPolygon],
                     sites: Optional[np.ndarray] = None,
                     density: Optional[DensityField] = None) -> str:
    """
    SVG document of a partition.

    Args:
        body: The partitioned body
        cells: Cell polygons (empty cells are skipped)
        sites: Optional sites drawn as dots
        density: Grid densities are drawn as a gray heatmap under the cells
    """
    stroke = body.diameter / 400.0
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {VIEWBOX:g} {VIEWBOX:g}" '
        f'width="{VIEWBOX:g}" height="{VIEWBOX:g}">',
        f'<g transform="{_transform(body)}">',
    ]
    if isinstance(density, GridDensity):
        lines.append('<g class="density">')
        lines.extend(_heatmap(density))
        lines.append('</g>')
    lines.append(f'<polygon class="body" points="{_points(body)}" fill="none" '
                 f'stroke="#000000" stroke-width="{2 * stroke!r}"/>')
    for i, cell in enumerate(cells):
        if cell.is_empty:
            continue
        lines.append(f'<polygon class="cell" data-index="{i}" points="{_points(cell)}" '
                     f'fill="{_PALETTE[i % len(_PALETTE)]}" fill-opacity="0.55" '
                     f'stroke="#222222" stroke-width="{stroke!r}"/>')
    if sites is not None:
        for x, y in np.asarray(sites, dtype=float).tolist():
            lines.append(f'<circle class="site" cx="{x!r}" cy="{y!r}" r="{2 * stroke!r}" fill="#000000"/>')
    lines.extend(['</g>', '</svg>'])
    return "\n".join(lines) + "\n"
