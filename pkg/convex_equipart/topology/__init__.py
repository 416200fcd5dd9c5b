"""
Topology module for convex-equipart
"""

from .cells import LabeledTree, chain_ranks, count_trees, enumerate_trees, euler_characteristic
from .obstruction import ObstructionReport, boundary_coefficient, obstruction, obstruction_table

__all__ = [
    'LabeledTree',
    'chain_ranks',
    'count_trees',
    'enumerate_trees',
    'euler_characteristic',
    'ObstructionReport',
    'boundary_coefficient',
    'obstruction',
    'obstruction_table',
]
