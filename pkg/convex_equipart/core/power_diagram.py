"""
Truncated Power Diagrams

A weighted configuration (sites x_i with radii r_i) assigns each point x of
a convex body K to the sites minimizing the power |x - x_i|^2 - r_i. The
resulting cells are convex: cell i is K cut by the halfplanes
{power_i <= power_j} for all j != i. This module builds those cells,
detects which cells share an edge, and recovers the radii of a diagram from
its cells up to a common shift.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order
from scipy.spatial.distance import pdist

from convex_equipart.errors import GeometryError, ReconstructionError
from convex_equipart.geometry.polygon import ConvexPolygon, HalfPlane, Point2, PointLike, clip_raw

logger = logging.getLogger(__name__)

# Sites closer than this fraction of diam(K) count as coincident.
SITE_SEPARATION_RTOL = 1e-9
# Shared edges shorter than this fraction of diam(K) do not make cells adjacent.
ADJACENCY_RTOL = 1e-10
# Distance (relative to the body scale) within which a cell vertex lies on a bisector.
_ON_LINE_RTOL = 1e-11


@dataclass(frozen=True, eq=False)
class WeightedConfiguration:
    """
    Sites with additive weights ("radii").

    Radii are only meaningful up to a common shift; ``normalized()`` fixes the
    representative with a zero last radius.
    """
    sites: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        sites = np.array(self.sites, dtype=float).reshape(-1, 2)
        radii = np.array(self.radii, dtype=float).reshape(-1)
        if len(sites) != len(radii):
            raise GeometryError(f"{len(sites)} sites but {len(radii)} radii")
        if len(sites) == 0:
            raise GeometryError("a configuration needs at least one site")
        if not (np.all(np.isfinite(sites)) and np.all(np.isfinite(radii))):
            raise GeometryError("sites and radii must be finite")
        sites.setflags(write=False)
        radii.setflags(write=False)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "radii", radii)

    @classmethod
    def voronoi(cls, sites) -> "WeightedConfiguration":
        sites = np.asarray(sites, dtype=float).reshape(-1, 2)
        return cls(sites, np.zeros(len(sites)))

    @property
    def n(self) -> int:
        return len(self.sites)

    @property
    def min_separation(self) -> float:
        if self.n < 2:
            return math.inf
        return float(np.min(pdist(self.sites)))

    def normalized(self) -> "WeightedConfiguration":
        return WeightedConfiguration(self.sites, self.radii - self.radii[-1])

    def shifted(self, c: float) -> "WeightedConfiguration":
        return WeightedConfiguration(self.sites, self.radii + c)

    def permuted(self, order: Sequence[int]) -> "WeightedConfiguration":
        """Relabel so that new site i is old site order[i]."""
        order = np.asarray(order, dtype=int)
        if sorted(order.tolist()) != list(range(self.n)):
            raise ValueError(f"not a permutation of 0..{self.n - 1}: {order.tolist()}")
        return WeightedConfiguration(self.sites[order], self.radii[order])

    def validate(self, body: ConvexPolygon) -> None:
        """Raise GeometryError if two sites are closer than the separation floor."""
        if self.n >= 2 and self.min_separation <= SITE_SEPARATION_RTOL * body.diameter:
            raise GeometryError(
                f"coincident sites: minimum separation {self.min_separation:.3e} "
                f"for body diameter {body.diameter:.3e}")

    def to_dict(self) -> Dict[str, Any]:
        return {"sites": self.sites.tolist(), "radii": self.radii.tolist()}


@dataclass(frozen=True, eq=False)
class PowerPartition:
    """
    The power diagram of a configuration intersected with a body.

    Attributes:
        config: The configuration the cells were built from
        body: The convex body K
        cells: One (possibly empty) convex polygon per site
        adjacency: Index pairs (i < j) whose cells share an edge of positive length
        shared_edges: Endpoints of each shared edge, keyed like adjacency
    """
    config: WeightedConfiguration
    body: ConvexPolygon
    cells: Tuple[ConvexPolygon, ...]
    adjacency: FrozenSet[Tuple[int, int]]
    shared_edges: Dict[Tuple[int, int], Tuple[Point2, Point2]] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.cells)

    @property
    def areas(self) -> np.ndarray:
        return np.array([cell.area for cell in self.cells])

    @property
    def empty_cells(self) -> List[int]:
        return [i for i, cell in enumerate(self.cells) if cell.is_empty]

    def neighbors(self, i: int) -> List[int]:
        return sorted(j if a == i else a for a, j in self.adjacency if i in (a, j))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "cells": [cell.to_list() for cell in self.cells],
            "adjacency": sorted([list(pair) for pair in self.adjacency]),
        }


def power_value(x: PointLike, site: PointLike, radius: float) -> float:
    """|x - site|^2 - radius."""
    dx = float(x[0]) - float(site[0])
    dy = float(x[1]) - float(site[1])
    return dx * dx + dy * dy - float(radius)


def bisector(x_i: PointLike, x_j: PointLike, r_i: float, r_j: float) -> HalfPlane:
    """
    The halfplane of points whose power with respect to site i does not
    exceed their power with respect to site j.

    Its boundary crosses the ray from x_i towards x_j at distance
    (|x_i - x_j|^2 - r_j + r_i) / (2 |x_i - x_j|) from x_i.

    Raises:
        GeometryError: if the sites coincide
    """
    xi = np.asarray(x_i, dtype=float)
    xj = np.asarray(x_j, dtype=float)
    delta = xj - xi
    distance = math.hypot(delta[0], delta[1])
    if distance == 0.0:
        raise GeometryError("bisector of coincident sites is undefined")
    unit = delta / distance
    offset = (distance * distance - r_j + r_i) / (2.0 * distance)
    return HalfPlane((float(unit[0]), float(unit[1])), float(unit @ xi) + offset)


def bisector_arrays(sites: np.ndarray, radii: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    All pairwise bisectors at once.

    Returns:
        (units, offsets, distances): units[i, j] is the unit vector from site i
        to site j, offsets[i, j] the offset of bisector(i, j) along it and
        distances[i, j] = |x_i - x_j|. Diagonal entries are meaningless.
    """
    delta = sites[None, :, :] - sites[:, None, :]
    distances = np.hypot(delta[:, :, 0], delta[:, :, 1])
    safe = np.where(distances > 0.0, distances, 1.0)
    units = delta / safe[:, :, None]
    offsets = np.einsum("ijk,ik->ij", units, sites) + (
        distances ** 2 - radii[None, :] + radii[:, None]) / (2.0 * safe)
    return units, offsets, distances


def build_cell(i: int, units: np.ndarray, offsets: np.ndarray, distances: np.ndarray,
               body: ConvexPolygon) -> ConvexPolygon:
    """Cell i: the body clipped by bisector(i, j) for every j, nearest sites first."""
    cell = body
    for j in np.argsort(distances[i], kind="stable"):
        if j == i:
            continue
        cell = clip_raw(cell, units[i, j, 0], units[i, j, 1], offsets[i, j])
        if cell.is_empty:
            break
    return cell


def _shared_edges(cells: Sequence[ConvexPolygon], units: np.ndarray, offsets: np.ndarray,
                  body: ConvexPolygon) -> Dict[Tuple[int, int], Tuple[Point2, Point2]]:
    """
    Detect shared edges: the face of cell i on the boundary line of
    bisector(i, j) is exactly the intersection of cells i and j.
    """
    scale = body.scale
    on_tol = _ON_LINE_RTOL * scale
    min_length = ADJACENCY_RTOL * body.diameter
    edges = {}
    for i, cell in enumerate(cells):
        if cell.is_empty:
            continue
        v = cell.vertices
        gap = v @ units[i].T - offsets[i][None, :]
        on_line = np.abs(gap) <= on_tol
        on_line[:, i] = False
        for j in np.nonzero(on_line.sum(axis=0) >= 2)[0]:
            if j < i and (j, i) in edges:
                continue
            if cells[j].is_empty:
                continue
            tangent = np.array([-units[i, j, 1], units[i, j, 0]])
            pts = v[on_line[:, j]]
            along = pts @ tangent
            a, b = pts[int(np.argmin(along))], pts[int(np.argmax(along))]
            if along.max() - along.min() <= min_length:
                continue
            key = (min(i, int(j)), max(i, int(j)))
            edges[key] = (Point2(float(a[0]), float(a[1])), Point2(float(b[0]), float(b[1])))
    return edges


def build(config: WeightedConfiguration, body: ConvexPolygon) -> PowerPartition:
    """
    Build the truncated power diagram of a configuration.

    Args:
        config: Sites and radii (sites must be pairwise distinct)
        body: Nonempty convex body

    Returns:
        PowerPartition with one cell per site; cells may be empty
    """
    if body.is_empty:
        raise GeometryError("cannot build a power diagram on an empty body")
    config.validate(body)
    units, offsets, distances = bisector_arrays(config.sites, config.radii)
    cells = tuple(build_cell(i, units, offsets, distances, body) for i in range(config.n))
    edges = _shared_edges(cells, units, offsets, body)
    return PowerPartition(config, body, cells, frozenset(edges), edges)


def reconstruct_radii(partition: PowerPartition, sites: Optional[Sequence[PointLike]] = None) -> np.ndarray:
    """
    Recover the radii of a power diagram from its cells.

    Radii are propagated from the last site (radius 0) over the adjacency
    graph: a shared edge of cells a and b lies at distance s from x_a along
    the direction to x_b, which fixes r_a = r_b + 2 d s - d^2 with
    d = |x_a - x_b|.

    Args:
        partition: A diagram whose cells are all nonempty
        sites: The sites (defaults to the partition's own configuration)

    Returns:
        Radii normalized so that the last one is zero

    Raises:
        ReconstructionError: a cell is empty or the adjacency graph is disconnected
    """
    pts = partition.config.sites if sites is None else np.asarray(sites, dtype=float).reshape(-1, 2)
    n = len(pts)
    if n != partition.n:
        raise ReconstructionError(f"{n} sites for a partition of {partition.n} cells")
    empty = partition.empty_cells
    if empty:
        raise ReconstructionError(f"cells {empty} are empty; radii are underdetermined")
    if n == 1:
        return np.zeros(1)

    pairs = np.array(sorted(partition.adjacency), dtype=int).reshape(-1, 2)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n)).tocsr()
    order, predecessors = breadth_first_order(graph, n - 1, directed=False, return_predecessors=True)
    if len(order) < n:
        missing = sorted(set(range(n)) - set(order.tolist()))
        raise ReconstructionError(f"adjacency graph is disconnected; cells {missing} unreachable")

    radii = np.zeros(n)
    for a in order[1:]:
        b = predecessors[a]
        p, q = partition.shared_edges[(min(a, b), max(a, b))]
        midpoint = 0.5 * (np.asarray(p) + np.asarray(q))
        delta = pts[b] - pts[a]
        d = math.hypot(delta[0], delta[1])
        s = float((midpoint - pts[a]) @ delta) / d
        radii[a] = radii[b] + 2.0 * d * s - d * d
    logger.debug(f"reconstructed {n} radii over {len(partition.adjacency)} shared edges")
    return radii


def vanishing_cells(config: WeightedConfiguration, body: ConvexPolygon, eps: float = 1e-6) -> List[int]:
    """
    Indices of cells that are empty but reappear once their own radius is
    raised by eps * diam(K)^2.
    """
    partition = build(config, body)
    bump = eps * body.diameter ** 2
    found = []
    for i in partition.empty_cells:
        radii = np.array(config.radii)
        radii[i] += bump
        units, offsets, distances = bisector_arrays(config.sites, radii)
        if not build_cell(i, units, offsets, distances, body).is_empty:
            found.append(i)
    return found
