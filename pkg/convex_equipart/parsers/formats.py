"""
Input File Formats

Readers for the two plain-text inputs of the command line tools:

* polygon files: one "x y" pair per line in counterclockwise order,
  ``#`` starts a comment;
* grid density files: a header "width height origin_x origin_y cell_size"
  followed by ``height`` rows of ``width`` nonnegative values, bottom row
  first.

Every diagnostic names the file and the offending line.
"""

import logging
import math
from pathlib import Path
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np

from convex_equipart.core.density import GridDensity
from convex_equipart.errors import FormatError, GeometryError
from convex_equipart.geometry.polygon import ConvexPolygon

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# Relative area mismatch above which an input polygon is reported as non-convex.
_CONVEXITY_RTOL = 1e-9


def _content_lines(text: str) -> Iterator[Tuple[int, List[str]]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if content:
            yield number, content.split()


def _parse_float(token: str, path: Optional[str], line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise FormatError(f"expected a number, got {token!r}", path, line) from None
    if not math.isfinite(value):
        raise FormatError(f"non-finite value {token!r}", path, line)
    return value


def parse_polygon(text: str, path: Optional[str] = None) -> ConvexPolygon:
    """
    Parse polygon text into a convex polygon.

    Args:
        text: File contents
        path: Name used in diagnostics

    Returns:
        The canonical polygon

    Raises:
        FormatError: malformed line, fewer than three vertices, zero area or
            a non-convex outline
    """
    points = []
    last_line = 0
    for number, tokens in _content_lines(text):
        if len(tokens) != 2:
            raise FormatError(f"expected 'x y', got {len(tokens)} fields", path, number)
        points.append((_parse_float(tokens[0], path, number), _parse_float(tokens[1], path, number)))
        last_line = number

    if len(points) < 3:
        raise FormatError(f"a polygon needs at least 3 vertices, found {len(points)}", path, last_line or None)

    pts = np.array(points)
    nxt = np.roll(pts, -1, axis=0)
    signed = 0.5 * float(np.sum(pts[:, 0] * nxt[:, 1] - nxt[:, 0] * pts[:, 1]))
    poly = ConvexPolygon(pts)
    if poly.is_empty:
        raise FormatError("polygon has zero area", path, last_line)
    if signed < 0.0:
        logger.warning(f"{path or 'polygon'}: vertices are clockwise, reversing")
    if abs(abs(signed) - poly.area) > _CONVEXITY_RTOL * poly.area:
        raise FormatError("polygon is not convex", path, last_line)
    return poly


def read_polygon(path: PathLike) -> ConvexPolygon:
    """Read a polygon file (see parse_polygon)."""
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return parse_polygon(text, str(path))


def parse_grid_density(text: str, path: Optional[str] = None, rule: str = "exact") -> GridDensity:
    """
    Parse grid density text.

    Values may be wrapped over lines freely; only their count and order
    (row by row from the bottom) matter.

    Raises:
        FormatError: bad header, non-numeric or negative value, wrong count,
            or a grid without mass
    """
    lines = list(_content_lines(text))
    if not lines:
        raise FormatError("empty grid density file", path, None)

    header_line, header = lines[0]
    if len(header) != 5:
        raise FormatError("header must be 'width height origin_x origin_y cell_size'", path, header_line)
    try:
        width, height = int(header[0]), int(header[1])
    except ValueError:
        raise FormatError("grid width and height must be integers", path, header_line) from None
    if width < 1 or height < 1:
        raise FormatError(f"grid shape {width}x{height} is empty", path, header_line)
    origin = (_parse_float(header[2], path, header_line), _parse_float(header[3], path, header_line))
    cell_size = _parse_float(header[4], path, header_line)
    if cell_size <= 0.0:
        raise FormatError(f"cell size must be positive, got {cell_size}", path, header_line)

    values = []
    last_line = header_line
    for number, tokens in lines[1:]:
        for token in tokens:
            value = _parse_float(token, path, number)
            if value < 0.0:
                raise FormatError(f"negative density {token}", path, number)
            values.append(value)
        last_line = number

    expected = width * height
    if len(values) != expected:
        raise FormatError(f"expected {expected} values for a {width}x{height} grid, found {len(values)}",
                          path, last_line)
    try:
        return GridDensity(origin, cell_size, np.array(values).reshape(height, width), rule=rule)
    except GeometryError as e:
        raise FormatError(str(e), path, None) from e


def read_grid_density(path: PathLike, rule: str = "exact") -> GridDensity:
    """Read a grid density file (see parse_grid_density)."""
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return parse_grid_density(text, str(path), rule=rule)
