"""
Parsers module for convex-equipart
"""

from .formats import parse_grid_density, parse_polygon, read_grid_density, read_polygon

__all__ = ['parse_grid_density', 'parse_polygon', 'read_grid_density', 'read_polygon']
