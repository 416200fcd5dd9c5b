"""
Density Fields

The source measures the transport solver distributes over a convex body:
the uniform measure on the body and piecewise-constant densities sampled on
a rectangular grid. Both integrate exactly over convex polygons; the grid
kind can alternatively use center-point membership.
"""

import math
from abc import ABC, abstractmethod
from typing import Any, Dict, Tuple

import numpy as np

from convex_equipart.errors import GeometryError
from convex_equipart.geometry.polygon import ConvexPolygon, Point2, PointLike

_GAUSS_OFFSET = 0.5 / math.sqrt(3.0)


class DensityField(ABC):
    """A finite measure with a density, integrable over convex polygons."""

    kind: str = ""
    # Mass tolerance the transport solver uses by default, relative to the total.
    default_tolerance: float = 1e-9

    @abstractmethod
    def mass(self, poly: ConvexPolygon) -> float:
        """Measure of a polygon."""

    @abstractmethod
    def second_moment(self, poly: ConvexPolygon, center: PointLike) -> float:
        """Integral of |x - center|^2 over a polygon against this measure."""

    @abstractmethod
    def line_mass(self, a: PointLike, b: PointLike) -> float:
        """Integral of the density along the segment a-b (arc length)."""

    @abstractmethod
    def restricted(self, cell: ConvexPolygon) -> "DensityField":
        """The measure restricted to a sub-body."""

    @abstractmethod
    def scaled(self, factor: float) -> "DensityField":
        """The measure multiplied by a positive factor."""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """Summary record for reports."""

    def total_mass(self, body: ConvexPolygon) -> float:
        return self.mass(body)

    def normalized(self, body: ConvexPolygon) -> "DensityField":
        """Rescale so that the body carries unit mass."""
        total = self.total_mass(body)
        if not total > 0.0:
            raise GeometryError(f"{self.kind} density has no mass on the body")
        return self.scaled(1.0 / total)


class UniformDensity(DensityField):
    """
    Constant density on a convex body.

    Polygons passed to the integrators are assumed to lie inside the body,
    which is always the case for cells of a partition of it.
    """

    kind = "uniform"
    default_tolerance = 1e-9

    def __init__(self, body: ConvexPolygon, total: float = None):
        if body.is_empty:
            raise GeometryError("uniform density needs a nonempty body")
        total = body.area if total is None else float(total)
        if not (math.isfinite(total) and total > 0.0):
            raise GeometryError(f"uniform density total must be positive, got {total}")
        self.body = body
        self.total = total
        self.value = total / body.area

    def mass(self, poly: ConvexPolygon) -> float:
        return self.value * poly.area

    def second_moment(self, poly: ConvexPolygon, center: PointLike) -> float:
        return self.value * poly.second_moment(center)

    def line_mass(self, a: PointLike, b: PointLike) -> float:
        return self.value * math.hypot(b[0] - a[0], b[1] - a[1])

    def total_mass(self, body: ConvexPolygon) -> float:
        return self.value * body.area

    def restricted(self, cell: ConvexPolygon) -> "UniformDensity":
        return UniformDensity(cell, self.value * cell.area)

    def scaled(self, factor: float) -> "UniformDensity":
        return UniformDensity(self.body, self.total * factor)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "total": self.total}


class GridDensity(DensityField):
    """
    Piecewise-constant density on square pixels.

    ``values[row, col]`` is the density on the pixel whose lower-left corner
    is ``origin + cell_size * (col, row)``; outside the grid the density is
    zero.

    Args:
        origin: Lower-left corner of the grid
        cell_size: Pixel side length
        values: (height, width) array of finite nonnegative densities
        rule: "exact" integrates the piecewise-constant density exactly;
              "center" counts a pixel when its center lies in the polygon
    """

    kind = "grid"
    default_tolerance = 1e-6
    RULES = ("exact", "center")

    def __init__(self, origin: PointLike, cell_size: float, values, rule: str = "exact"):
        grid = np.array(values, dtype=float)
        if grid.ndim != 2 or grid.size == 0:
            raise GeometryError("grid density values must be a nonempty 2-D array")
        if not np.all(np.isfinite(grid)) or np.any(grid < 0.0):
            raise GeometryError("grid density values must be finite and nonnegative")
        if not grid.sum() > 0.0:
            raise GeometryError("grid density has zero total mass")
        if not (math.isfinite(cell_size) and cell_size > 0.0):
            raise GeometryError(f"grid cell size must be positive, got {cell_size}")
        if rule not in self.RULES:
            raise ValueError(f"Invalid rule: {rule}. Must be one of {self.RULES}")
        grid.setflags(write=False)

        self.origin = Point2(float(origin[0]), float(origin[1]))
        self.cell_size = float(cell_size)
        self.values = grid
        self.rule = rule
        self.height, self.width = grid.shape
        h = self.cell_size
        self._x_lines = self.origin.x + h * np.arange(self.width + 1)
        self._y_lines = self.origin.y + h * np.arange(self.height + 1)
        # _row_cum[r, c]: mass density integrated over pixels 0..c-1 of row r (per unit y)
        self._row_cum = np.concatenate(
            [np.zeros((self.height, 1)), np.cumsum(grid * h, axis=1)], axis=1)

    # -- DensityField interface ---------------------------------------------

    def mass(self, poly: ConvexPolygon) -> float:
        if poly.is_empty:
            return 0.0
        if self.rule == "center":
            weights, _ = self._center_samples(poly)
            return float(weights.sum())
        return self._boundary_integral(poly, self._mass_antiderivative)

    def second_moment(self, poly: ConvexPolygon, center: PointLike) -> float:
        if poly.is_empty:
            return 0.0
        a, b = float(center[0]), float(center[1])
        if self.rule == "center":
            weights, points = self._center_samples(poly)
            return float(np.sum(weights * ((points[:, 0] - a) ** 2 + (points[:, 1] - b) ** 2)))
        return self._moment_integral(poly, a, b)

    def line_mass(self, a: PointLike, b: PointLike) -> float:
        p = (float(a[0]), float(a[1]))
        q = (float(b[0]), float(b[1]))
        length = math.hypot(q[0] - p[0], q[1] - p[1])
        if length == 0.0:
            return 0.0
        ts = self._breakpoints(p, q)
        t0, t1 = ts[:-1], ts[1:]
        mid = 0.5 * (t0 + t1)
        row, col, valid = self._locate(p[0] + mid * (q[0] - p[0]), p[1] + mid * (q[1] - p[1]))
        dens = np.where(valid, self.values[row, col], 0.0)
        return float(np.sum(dens * (t1 - t0))) * length

    def restricted(self, cell: ConvexPolygon) -> "GridDensity":
        # Integrals are always taken over the polygons handed in.
        return self

    def scaled(self, factor: float) -> "GridDensity":
        return GridDensity(self.origin, self.cell_size, self.values * factor, self.rule)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "origin": list(self.origin),
            "cell_size": self.cell_size,
            "shape": [self.width, self.height],
            "rule": self.rule,
        }

    @property
    def extent(self) -> Tuple[float, float, float, float]:
        return (self.origin.x, self.origin.y, float(self._x_lines[-1]), float(self._y_lines[-1]))

    # -- center-point rule --------------------------------------------------

    def _center_samples(self, poly: ConvexPolygon) -> Tuple[np.ndarray, np.ndarray]:
        """Pixel masses and centers for the pixels whose center lies in poly (half-open on edges)."""
        h = self.cell_size
        xmin, ymin, xmax, ymax = poly.bounding_box
        c_lo = max(0, math.ceil((xmin - self.origin.x) / h - 0.5))
        c_hi = min(self.width - 1, math.floor((xmax - self.origin.x) / h - 0.5))
        r_lo = max(0, math.ceil((ymin - self.origin.y) / h - 0.5))
        r_hi = min(self.height - 1, math.floor((ymax - self.origin.y) / h - 0.5))
        if c_lo > c_hi or r_lo > r_hi:
            return np.zeros(0), np.zeros((0, 2))
        cols = np.arange(c_lo, c_hi + 1)
        rows = np.arange(r_lo, r_hi + 1)
        cc, rr = np.meshgrid(cols, rows)
        centers = np.column_stack([
            self.origin.x + (cc.ravel() + 0.5) * h,
            self.origin.y + (rr.ravel() + 0.5) * h,
        ])
        inside = poly.contains_half_open(centers)
        weights = self.values[rr.ravel()[inside], cc.ravel()[inside]] * h * h
        return weights, centers[inside]

    # -- exact rule (Green's theorem) ---------------------------------------
    #
    # For F(x, y) = integral of the density along the row from the grid's left
    # edge to x, dF/dx is the density, so the area integral over a
    # counterclockwise polygon equals the boundary integral of F dy. Boundary
    # edges are split at grid lines so that every piece stays in one pixel,
    # where F is a low-degree polynomial.

    def _breakpoints(self, p: Tuple[float, float], q: Tuple[float, float]) -> np.ndarray:
        """Sorted edge parameters in [0, 1] where p-q crosses a grid line."""
        h = self.cell_size
        pieces = [np.array([0.0, 1.0])]
        for axis, count, lines in ((0, self.width, self._x_lines), (1, self.height, self._y_lines)):
            delta = q[axis] - p[axis]
            if delta == 0.0:
                continue
            u0 = (p[axis] - lines[0]) / h
            u1 = (q[axis] - lines[0]) / h
            k_lo = max(0, math.ceil(min(u0, u1)))
            k_hi = min(count, math.floor(max(u0, u1)))
            if k_lo > k_hi:
                continue
            t = (lines[k_lo:k_hi + 1] - p[axis]) / delta
            pieces.append(t[(t > 0.0) & (t < 1.0)])
        return np.unique(np.concatenate(pieces))

    def _locate(self, x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Pixel indices of points (clamped) and a mask of points inside the grid."""
        h = self.cell_size
        col_f = np.floor((x - self.origin.x) / h)
        row_f = np.floor((y - self.origin.y) / h)
        valid = (row_f >= 0) & (row_f < self.height) & (col_f >= 0) & (col_f < self.width)
        col = np.clip(col_f, 0, self.width - 1).astype(int)
        row = np.clip(row_f, 0, self.height - 1).astype(int)
        return row, col, valid

    def _row_index(self, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        row_f = np.floor((y - self.origin.y) / self.cell_size)
        valid = (row_f >= 0) & (row_f < self.height)
        return np.clip(row_f, 0, self.height - 1).astype(int), valid

    def _col_index(self, x: np.ndarray) -> np.ndarray:
        col_f = np.floor((x - self.origin.x) / self.cell_size)
        return np.clip(col_f, 0, self.width - 1).astype(int)

    def _mass_antiderivative(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        row, valid = self._row_index(y)
        col = self._col_index(x)
        xe = np.clip(x, self._x_lines[0], self._x_lines[-1])
        F = self._row_cum[row, col] + self.values[row, col] * (xe - self._x_lines[col])
        return np.where(valid, F, 0.0)

    def _boundary_integral(self, poly: ConvexPolygon, antiderivative) -> float:
        v = poly.vertices.tolist()
        total = 0.0
        for i, p in enumerate(v):
            q = v[(i + 1) % len(v)]
            if q[1] == p[1]:
                continue
            ts = self._breakpoints(p, q)
            t0, t1 = ts[:-1], ts[1:]
            mid = 0.5 * (t0 + t1)
            F = antiderivative(p[0] + mid * (q[0] - p[0]), p[1] + mid * (q[1] - p[1]))
            total += float(np.sum(F * (t1 - t0))) * (q[1] - p[1])
        return total

    def _moment_integral(self, poly: ConvexPolygon, a: float, b: float) -> float:
        lines = self._x_lines
        # exact x-integral of (s - a)^2 over each full pixel, accumulated per row
        pixel = ((lines[1:] - a) ** 3 - (lines[:-1] - a) ** 3) / 3.0
        cum_sq = np.concatenate(
            [np.zeros((self.height, 1)), np.cumsum(self.values * pixel[None, :], axis=1)], axis=1)

        def antiderivative(x, y, row, col, valid):
            xe = np.clip(x, lines[0], lines[-1])
            dy2 = (y - b) ** 2
            F = (cum_sq[row, col] + dy2 * self._row_cum[row, col]
                 + self.values[row, col] * (((xe - a) ** 3 - (lines[col] - a) ** 3) / 3.0
                                            + dy2 * (xe - lines[col])))
            return np.where(valid, F, 0.0)

        v = poly.vertices.tolist()
        total = 0.0
        for i, p in enumerate(v):
            q = v[(i + 1) % len(v)]
            if q[1] == p[1]:
                continue
            ts = self._breakpoints(p, q)
            t0, t1 = ts[:-1], ts[1:]
            mid = 0.5 * (t0 + t1)
            row, valid = self._row_index(p[1] + mid * (q[1] - p[1]))
            col = self._col_index(p[0] + mid * (q[0] - p[0]))
            half = t1 - t0
            acc = np.zeros_like(mid)
            # two-point Gauss-Legendre is exact for the cubic integrand
            for node in (mid - _GAUSS_OFFSET * half, mid + _GAUSS_OFFSET * half):
                acc += antiderivative(p[0] + node * (q[0] - p[0]), p[1] + node * (q[1] - p[1]),
                                      row, col, valid)
            total += float(np.sum(0.5 * acc * half)) * (q[1] - p[1])
        return total
