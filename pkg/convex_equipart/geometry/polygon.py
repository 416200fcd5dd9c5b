"""
Planar Convex Geometry

This module defines the immutable polygon values every other part of the
package is built on: points, halfplanes and canonical convex polygons, plus
halfplane clipping, the metric functionals (area, perimeter, centroid,
diameter, width, second moment) and the Hausdorff distance between convex
polygons.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import ConvexHull
from scipy.spatial.distance import pdist

from convex_equipart.errors import GeometryError

# Relative to the bounding-box diagonal of the polygon being built.
COLLINEAR_RTOL = 1e-12

# Shift direction deciding which polygon owns a point on a shared edge.
TIE_BREAK_DIRECTION = (1.0, 0.5772156649015329)

_NO_VERTICES = np.zeros((0, 2))
_NO_VERTICES.setflags(write=False)


class Point2(NamedTuple):
    """A point of the plane."""
    x: float
    y: float


PointLike = Union[Point2, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class HalfPlane:
    """The closed halfplane {p : normal . p <= offset} with a unit normal."""
    normal: Tuple[float, float]
    offset: float

    def __post_init__(self):
        nx, ny = float(self.normal[0]), float(self.normal[1])
        offset = float(self.offset)
        length = math.hypot(nx, ny)
        if not (math.isfinite(length) and math.isfinite(offset)) or length == 0.0:
            raise GeometryError(f"degenerate halfplane normal {self.normal!r}")
        if abs(length - 1.0) > 1e-12:
            nx, ny, offset = nx / length, ny / length, offset / length
        object.__setattr__(self, "normal", (nx, ny))
        object.__setattr__(self, "offset", offset)

    def complement(self) -> "HalfPlane":
        """The opposite closed halfplane sharing the same boundary line."""
        return HalfPlane((-self.normal[0], -self.normal[1]), -self.offset)

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        """Positive outside, negative inside, zero on the boundary line."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return pts @ np.asarray(self.normal) - self.offset


class ConvexPolygon:
    """
    A convex polygon stored as counterclockwise vertices in strictly convex
    position.

    Construction canonicalizes the input: orientation is made
    counterclockwise, repeated and collinear vertices are merged and
    zero-area results collapse to the empty polygon. The empty polygon is an
    ordinary value (``is_empty``) rather than an error.
    """

    def __init__(self, vertices: Iterable[PointLike] = ()):
        pts = np.asarray(list(vertices) if not isinstance(vertices, np.ndarray) else vertices,
                         dtype=float)
        if pts.size == 0:
            self._vertices = _NO_VERTICES
            return
        pts = pts.reshape(-1, 2)
        if not np.all(np.isfinite(pts)):
            raise GeometryError("polygon vertices must be finite")
        canonical = _canonicalize(pts)
        canonical.setflags(write=False)
        self._vertices = canonical

    # -- constructors -------------------------------------------------------

    @classmethod
    def empty(cls) -> "ConvexPolygon":
        return _EMPTY

    @classmethod
    def from_points(cls, points: Iterable[PointLike]) -> "ConvexPolygon":
        """Convex hull of a finite point set."""
        pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
        if len(pts) < 3:
            return _EMPTY
        try:
            hull = ConvexHull(pts)
        except Exception:  # scipy raises QhullError for flat input
            return _EMPTY
        return cls(pts[hull.vertices])

    @classmethod
    def box(cls, xmin: float, ymin: float, xmax: float, ymax: float) -> "ConvexPolygon":
        return cls([(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)])

    @classmethod
    def regular(cls, k: int, radius: float = 1.0, center: PointLike = (0.0, 0.0),
                phase: float = 0.0) -> "ConvexPolygon":
        """Regular k-gon inscribed in the circle of the given radius."""
        angles = phase + 2.0 * np.pi * np.arange(k) / k
        cx, cy = float(center[0]), float(center[1])
        return cls(np.column_stack([cx + radius * np.cos(angles), cy + radius * np.sin(angles)]))

    # -- basic accessors ----------------------------------------------------

    @property
    def vertices(self) -> np.ndarray:
        """Read-only (k, 2) array of counterclockwise vertices."""
        return self._vertices

    @property
    def is_empty(self) -> bool:
        return len(self._vertices) == 0

    def __len__(self) -> int:
        return len(self._vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConvexPolygon):
            return NotImplemented
        return self._vertices.shape == other._vertices.shape and bool(
            np.array_equal(self._vertices, other._vertices))

    __hash__ = None

    def __repr__(self) -> str:
        if self.is_empty:
            return "ConvexPolygon.empty()"
        return f"ConvexPolygon({self._vertices.tolist()!r})"

    def to_list(self) -> List[List[float]]:
        return self._vertices.tolist()

    @cached_property
    def bounding_box(self) -> Tuple[float, float, float, float]:
        if self.is_empty:
            return (0.0, 0.0, 0.0, 0.0)
        lo = self._vertices.min(axis=0)
        hi = self._vertices.max(axis=0)
        return (float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))

    @cached_property
    def scale(self) -> float:
        """Bounding-box diagonal; the unit of every relative tolerance."""
        xmin, ymin, xmax, ymax = self.bounding_box
        return math.hypot(xmax - xmin, ymax - ymin)

    # -- metric functionals -------------------------------------------------

    @cached_property
    def area(self) -> float:
        if self.is_empty:
            return 0.0
        return 0.5 * float(np.sum(_edge_cross(self._vertices - self._vertices[0])))

    @cached_property
    def perimeter(self) -> float:
        if self.is_empty:
            return 0.0
        edges = np.roll(self._vertices, -1, axis=0) - self._vertices
        return float(np.sum(np.hypot(edges[:, 0], edges[:, 1])))

    @cached_property
    def centroid(self) -> Point2:
        self._require_nonempty("centroid")
        origin = self._vertices[0]
        v = self._vertices - origin
        w = np.roll(v, -1, axis=0)
        cross = _edge_cross(v)
        twice_area = float(np.sum(cross))
        cx = float(np.sum((v[:, 0] + w[:, 0]) * cross)) / (3.0 * twice_area)
        cy = float(np.sum((v[:, 1] + w[:, 1]) * cross)) / (3.0 * twice_area)
        return Point2(cx + float(origin[0]), cy + float(origin[1]))

    @cached_property
    def diameter(self) -> float:
        self._require_nonempty("diameter")
        return float(np.max(pdist(self._vertices)))

    @cached_property
    def width(self) -> float:
        """
        Minimal width over the edge directions (rotating calipers: the
        minimal strip enclosing a convex polygon has a side flush with an edge).
        """
        self._require_nonempty("width")
        v = self._vertices
        edges = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        # heights[i, j]: distance of vertex j from the line through edge i
        rel = v[None, :, :] - v[:, None, :]
        heights = (edges[:, None, 0] * rel[:, :, 1] - edges[:, None, 1] * rel[:, :, 0]) / lengths[:, None]
        return float(np.min(np.max(heights, axis=1)))

    @property
    def bbox_center(self) -> Point2:
        self._require_nonempty("bbox_center")
        xmin, ymin, xmax, ymax = self.bounding_box
        return Point2(0.5 * (xmin + xmax), 0.5 * (ymin + ymax))

    def second_moment(self, center: PointLike) -> float:
        """Exact polar moment of inertia: integral of |x - center|^2 over the polygon."""
        if self.is_empty:
            return 0.0
        v = self._vertices - np.asarray(center, dtype=float)
        w = np.roll(v, -1, axis=0)
        cross = _edge_cross(v)
        terms = (v[:, 0] ** 2 + v[:, 0] * w[:, 0] + w[:, 0] ** 2
                 + v[:, 1] ** 2 + v[:, 1] * w[:, 1] + w[:, 1] ** 2)
        return float(np.sum(cross * terms)) / 12.0

    # -- point queries ------------------------------------------------------

    def contains(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        """Boolean mask of the points lying in the closed polygon (tol widens it)."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        if self.is_empty:
            return np.zeros(len(pts), dtype=bool)
        v = self._vertices
        edges = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        rel = pts[:, None, :] - v[None, :, :]
        side = (edges[None, :, 0] * rel[:, :, 1] - edges[None, :, 1] * rel[:, :, 0]) / lengths[None, :]
        return np.all(side >= -tol, axis=1)

    def contains_half_open(self, points: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
        """
        Membership that assigns a point on an edge to exactly one of the two
        polygons sharing that edge: the point counts when it moves inside
        under the small shift along TIE_BREAK_DIRECTION.
        """
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        if self.is_empty:
            return np.zeros(len(pts), dtype=bool)
        if tol is None:
            tol = 1e-12 * self.scale
        v = self._vertices
        edges = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        rel = pts[:, None, :] - v[None, :, :]
        side = (edges[None, :, 0] * rel[:, :, 1] - edges[None, :, 1] * rel[:, :, 0]) / lengths[None, :]
        # outward normals dotted with the shift
        w = TIE_BREAK_DIRECTION
        entering = (edges[:, 1] * w[0] - edges[:, 0] * w[1]) < 0.0
        on_edge = np.abs(side) <= tol
        return np.all((side > tol) | (on_edge & entering[None, :]), axis=1)

    def nearest_points(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Nearest polygon points and distances for a batch of query points.

        Returns:
            (nearest, distances); points inside the polygon are their own
            nearest point at distance zero.
        """
        self._require_nonempty("nearest_points")
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        v = self._vertices
        edges = np.roll(v, -1, axis=0) - v
        squared = np.sum(edges ** 2, axis=1)
        rel = pts[:, None, :] - v[None, :, :]
        t = np.clip(np.sum(rel * edges[None, :, :], axis=2) / squared[None, :], 0.0, 1.0)
        proj = v[None, :, :] + t[:, :, None] * edges[None, :, :]
        dist = np.hypot(pts[:, None, 0] - proj[:, :, 0], pts[:, None, 1] - proj[:, :, 1])
        best = np.argmin(dist, axis=1)
        rows = np.arange(len(pts))
        nearest = proj[rows, best]
        distances = dist[rows, best]
        inside = self.contains(pts, tol=COLLINEAR_RTOL * self.scale)
        nearest[inside] = pts[inside]
        distances[inside] = 0.0
        return nearest, distances

    def distance_to(self, point: PointLike) -> float:
        return float(self.nearest_points(np.asarray(point, dtype=float))[1][0])

    def nearest_point(self, point: PointLike) -> Point2:
        nearest = self.nearest_points(np.asarray(point, dtype=float))[0][0]
        return Point2(float(nearest[0]), float(nearest[1]))

    # -- derived polygons ---------------------------------------------------

    def edge_halfplanes(self) -> List[HalfPlane]:
        """The supporting halfplanes whose intersection is this polygon."""
        self._require_nonempty("edge_halfplanes")
        v = self._vertices
        planes = []
        for a, b in zip(v, np.roll(v, -1, axis=0)):
            # outward normal of a counterclockwise edge
            normal = (b[1] - a[1], a[0] - b[0])
            planes.append(HalfPlane(normal, normal[0] * a[0] + normal[1] * a[1]))
        return planes

    def transformed(self, angle: float = 0.0, translation: PointLike = (0.0, 0.0)) -> "ConvexPolygon":
        """Image under the rigid motion p -> R(angle) p + translation."""
        if self.is_empty:
            return self
        c, s = math.cos(angle), math.sin(angle)
        rotation = np.array([[c, -s], [s, c]])
        return ConvexPolygon(self._vertices @ rotation.T + np.asarray(translation, dtype=float))

    def _require_nonempty(self, what: str) -> None:
        if self.is_empty:
            raise GeometryError(f"{what} of an empty polygon is undefined")


def _edge_cross(v: np.ndarray) -> np.ndarray:
    w = np.roll(v, -1, axis=0)
    return v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]


def _canonicalize(pts: np.ndarray) -> np.ndarray:
    """Counterclockwise, strictly convex vertex array (or no vertices)."""
    if len(pts) < 3:
        return _NO_VERTICES
    if np.sum(_edge_cross(pts - pts[0])) < 0.0:
        pts = pts[::-1]
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    diag = math.hypot(hi[0] - lo[0], hi[1] - lo[1])
    if diag == 0.0:
        return _NO_VERTICES
    tol = COLLINEAR_RTOL * diag

    verts = [(float(x), float(y)) for x, y in pts]
    changed = True
    while changed and len(verts) >= 3:
        changed = False
        k = len(verts)
        for i in range(k):
            ax, ay = verts[i - 1]
            bx, by = verts[i]
            cx, cy = verts[(i + 1) % k]
            chord = math.hypot(cx - ax, cy - ay)
            # distance of b from the chord a-c; negative means reflex
            bulge = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
            if chord <= tol or bulge <= tol * chord:
                del verts[i]
                changed = True
                break
    if len(verts) < 3:
        return _NO_VERTICES
    out = np.array(verts)
    if 0.5 * np.sum(_edge_cross(out - out[0])) <= tol * diag:
        return _NO_VERTICES
    return out


_EMPTY = ConvexPolygon()


def clip(poly: ConvexPolygon, h: HalfPlane) -> ConvexPolygon:
    """
    Intersect a convex polygon with a closed halfplane.

    Vertices within the collinearity tolerance of the boundary count as
    inside, so clipping twice by the same halfplane returns the very same
    polygon.

    Args:
        poly: Canonical convex polygon
        h: Halfplane to keep

    Returns:
        The canonical intersection, or the empty polygon if it has no area
    """
    return clip_raw(poly, h.normal[0], h.normal[1], h.offset)


def clip_raw(poly: ConvexPolygon, nx: float, ny: float, offset: float) -> ConvexPolygon:
    """clip() for a halfplane given as a unit normal and an offset."""
    if poly.is_empty:
        return poly
    v = poly.vertices
    d = v[:, 0] * nx + v[:, 1] * ny - offset
    inside = d <= COLLINEAR_RTOL * poly.scale
    if inside.all():
        return poly
    if not inside.any():
        return _EMPTY

    vl = v.tolist()
    dl = d.tolist()
    il = inside.tolist()
    k = len(vl)
    out = []
    for i in range(k):
        j = (i + 1) % k
        if il[i]:
            out.append(vl[i])
        if il[i] != il[j]:
            t = dl[i] / (dl[i] - dl[j])
            out.append((vl[i][0] + t * (vl[j][0] - vl[i][0]),
                        vl[i][1] + t * (vl[j][1] - vl[i][1])))
    return ConvexPolygon(out)


def intersect(a: ConvexPolygon, b: ConvexPolygon) -> ConvexPolygon:
    """Intersection of two convex polygons (a clipped by every edge of b)."""
    if a.is_empty or b.is_empty:
        return _EMPTY
    result = a
    for plane in b.edge_halfplanes():
        result = clip(result, plane)
        if result.is_empty:
            break
    return result


def hausdorff_distance(a: ConvexPolygon, b: ConvexPolygon) -> float:
    """
    Hausdorff distance between two nonempty convex polygons.

    The distance to a convex set is a convex function, so its maximum over
    the other polygon is attained at a vertex.
    """
    if a.is_empty or b.is_empty:
        raise GeometryError("Hausdorff distance is undefined for an empty polygon")
    forward = float(np.max(b.nearest_points(a.vertices)[1]))
    backward = float(np.max(a.nearest_points(b.vertices)[1]))
    return max(forward, backward)
