"""
Cell Functionals

Continuous functionals on convex cells that an equipartition equalizes:
perimeter, diameter, width, maps of a cell center, the Minkowski gauge of
the cell centroid in the body, and the mass of a second measure. Each
functional turns a column of per-cell values into a residual vector and a
spread, both dimensionless.
"""

from abc import ABC, abstractmethod
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from convex_equipart.core.density import DensityField
from convex_equipart.geometry.polygon import ConvexPolygon


class CellFunctional(ABC):
    """
    A functional G evaluated on every cell of a partition.

    By default the cells are asked to agree with each other; functionals
    with an absolute target (MeasureMass) compare against it instead.
    """

    name: str = ""

    @abstractmethod
    def evaluate(self, cell: ConvexPolygon) -> float:
        """Value of the functional on a nonempty cell."""

    def target(self, body: ConvexPolygon, n: int) -> Optional[float]:
        """Absolute per-cell target, or None when cells only need to agree."""
        return None

    def scale(self, values: np.ndarray, body: ConvexPolygon) -> float:
        """Normalization of the spread; the mean magnitude of the column by default."""
        mean = float(np.mean(np.abs(values)))
        return mean if mean > 0.0 else 1.0

    def restricted(self, cell: ConvexPolygon) -> "CellFunctional":
        """The functional to use when the cell is subdivided further."""
        return self

    def values(self, cells: Sequence[ConvexPolygon]) -> np.ndarray:
        return np.array([self.evaluate(cell) if not cell.is_empty else np.nan for cell in cells])

    def residual(self, values: np.ndarray, body: ConvexPolygon) -> np.ndarray:
        """Values minus their mean (or minus the absolute target)."""
        goal = self.target(body, len(values))
        return values - (np.mean(values) if goal is None else goal)

    def spread(self, values: np.ndarray, body: ConvexPolygon) -> float:
        if np.any(~np.isfinite(values)):
            return float("inf")
        goal = self.target(body, len(values))
        if goal is None:
            return float(np.max(values) - np.min(values)) / self.scale(values, body)
        return float(np.max(np.abs(values - goal))) / self.scale(values, body)

    def to_dict(self) -> Dict[str, str]:
        return {"name": self.name}


class Perimeter(CellFunctional):
    name = "perimeter"

    def evaluate(self, cell: ConvexPolygon) -> float:
        return cell.perimeter


class Diameter(CellFunctional):
    name = "diameter"

    def evaluate(self, cell: ConvexPolygon) -> float:
        return cell.diameter


class Width(CellFunctional):
    name = "width"

    def evaluate(self, cell: ConvexPolygon) -> float:
        return cell.width


def _first(point) -> float:
    return float(point[0])


def _second(point) -> float:
    return float(point[1])


class CentroidMap(CellFunctional):
    """
    g(center(cell)) for a real map g of the plane.

    Args:
        g: The map applied to the center
        name: Label used in reports
        centermap: "centroid" (barycenter) or "bbox-center"
    """

    CENTERMAPS = ("centroid", "bbox-center")

    def __init__(self, g: Callable, name: str = "centroid-map", centermap: str = "centroid"):
        if centermap not in self.CENTERMAPS:
            raise ValueError(f"Invalid centermap: {centermap}. Must be one of {self.CENTERMAPS}")
        self.g = g
        self.name = name
        self.centermap = centermap

    def evaluate(self, cell: ConvexPolygon) -> float:
        center = cell.centroid if self.centermap == "centroid" else cell.bbox_center
        return float(self.g(center))

    def scale(self, values: np.ndarray, body: ConvexPolygon) -> float:
        # center coordinates can average to zero; measure against the body instead
        return body.diameter

    def to_dict(self) -> Dict[str, str]:
        return {"name": self.name, "centermap": self.centermap}


class MinkowskiGauge(CellFunctional):
    """
    Minkowski gauge of the cell centroid with respect to the body centered at
    its own centroid g: the least t >= 0 with c - g in t (K - g). It is 0 at g
    and 1 on the boundary of K.
    """

    name = "minkowski"

    def __init__(self, body: ConvexPolygon):
        if body.is_empty:
            raise ValueError("the Minkowski gauge needs a nonempty body")
        self.body = body
        self.center = np.asarray(body.centroid)
        planes = body.edge_halfplanes()
        self.normals = np.array([plane.normal for plane in planes])
        # distances from g to the edge lines, all positive for an interior g
        self.reach = np.array([plane.offset for plane in planes]) - self.normals @ self.center

    def evaluate(self, cell: ConvexPolygon) -> float:
        v = np.asarray(cell.centroid) - self.center
        return max(0.0, float(np.max(self.normals @ v / self.reach)))

    def scale(self, values: np.ndarray, body: ConvexPolygon) -> float:
        return 1.0

    def restricted(self, cell: ConvexPolygon) -> "MinkowskiGauge":
        return MinkowskiGauge(cell)


class MeasureMass(CellFunctional):
    """
    Mass of each cell under a second measure, targeting an equal share of
    that measure's mass on the body.
    """

    name = "measure-mass"

    def __init__(self, density: DensityField):
        self.density = density

    def evaluate(self, cell: ConvexPolygon) -> float:
        return self.density.mass(cell)

    def target(self, body: ConvexPolygon, n: int) -> Optional[float]:
        return self.density.total_mass(body) / n

    def scale(self, values: np.ndarray, body: ConvexPolygon) -> float:
        return self.density.total_mass(body)

    def restricted(self, cell: ConvexPolygon) -> "MeasureMass":
        return MeasureMass(self.density.restricted(cell))

    def to_dict(self) -> Dict[str, str]:
        return {"name": self.name, "density": self.density.kind}


_BUILTIN = {
    "perimeter": Perimeter,
    "diameter": Diameter,
    "width": Width,
    "centroid-x": lambda: CentroidMap(_first, name="centroid-x"),
    "centroid-y": lambda: CentroidMap(_second, name="centroid-y"),
    "minkowski": MinkowskiGauge,
}

FUNCTIONAL_KINDS = tuple(_BUILTIN)


def make_functional(kind: str, centermap: str = "centroid",
                    body: Optional[ConvexPolygon] = None) -> CellFunctional:
    """Build a named functional (see FUNCTIONAL_KINDS); "minkowski" needs the body."""
    if kind not in _BUILTIN:
        raise ValueError(f"Invalid functional: {kind}. Must be one of {FUNCTIONAL_KINDS}")
    if kind == "minkowski":
        if body is None:
            raise ValueError("the minkowski functional is measured in a body; pass body=")
        return MinkowskiGauge(body)
    functional = _BUILTIN[kind]()
    if isinstance(functional, CentroidMap) and centermap != "centroid":
        functional = CentroidMap(functional.g, name=functional.name, centermap=centermap)
    return functional
