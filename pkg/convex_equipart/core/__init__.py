"""
Core module for convex-equipart
"""

from .density import DensityField, GridDensity, UniformDensity
from .power_diagram import (
    PowerPartition,
    WeightedConfiguration,
    bisector,
    build,
    power_value,
    reconstruct_radii,
    vanishing_cells,
)
from .transport import (
    MassTargets,
    TransportResult,
    TransportSolver,
    cell_mass,
    dual_objective,
    solve_radii,
    transport_cost,
)
from .functionals import (
    CellFunctional,
    CentroidMap,
    Diameter,
    MeasureMass,
    MinkowskiGauge,
    Perimeter,
    Width,
    make_functional,
)
from .equipartition import (
    EquipartitionResult,
    EquipartitionSearch,
    PartitionNode,
    SearchOptions,
    factor_recursive,
    multi_measure_partition,
    prime_power_factors,
    residual,
    search,
)

__all__ = [
    'DensityField', 'GridDensity', 'UniformDensity',
    'PowerPartition', 'WeightedConfiguration', 'bisector', 'build', 'power_value',
    'reconstruct_radii', 'vanishing_cells',
    'MassTargets', 'TransportResult', 'TransportSolver', 'cell_mass', 'dual_objective',
    'solve_radii', 'transport_cost',
    'CellFunctional', 'CentroidMap', 'Diameter', 'MeasureMass', 'MinkowskiGauge', 'Perimeter',
    'Width',
    'make_functional',
    'EquipartitionResult', 'EquipartitionSearch', 'PartitionNode', 'SearchOptions',
    'factor_recursive', 'multi_measure_partition', 'prime_power_factors', 'residual', 'search',
]
