"""
convex-equipart: Convex Equipartitions via Power Diagrams

Partitions a planar convex body into n convex cells of equal measure that
also share the value of a second functional (perimeter, diameter, width, a
second measure, ...), using semi-discrete optimal transport for the mass
constraint and a derivative-free search over the sites. A combinatorial
module computes the prime-power obstruction behind the existence of such
partitions.
"""

__version__ = "1.0.0"
__author__ = "convex-equipart Team"

from .core.density import GridDensity, UniformDensity
from .core.equipartition import (
    EquipartitionResult,
    SearchOptions,
    factor_recursive,
    multi_measure_partition,
    search,
)
from .core.power_diagram import PowerPartition, WeightedConfiguration, build, reconstruct_radii
from .core.transport import MassTargets, TransportSolver, solve_radii, transport_cost
from .geometry.polygon import ConvexPolygon, HalfPlane, Point2
from .topology.cells import LabeledTree, enumerate_trees
from .topology.obstruction import obstruction

__all__ = [
    'ConvexPolygon',
    'HalfPlane',
    'Point2',
    'GridDensity',
    'UniformDensity',
    'WeightedConfiguration',
    'PowerPartition',
    'build',
    'reconstruct_radii',
    'MassTargets',
    'TransportSolver',
    'solve_radii',
    'transport_cost',
    'SearchOptions',
    'EquipartitionResult',
    'search',
    'multi_measure_partition',
    'factor_recursive',
    'LabeledTree',
    'enumerate_trees',
    'obstruction',
]
