"""
Report module for convex-equipart
"""

from .serialize import (
    SCHEMA_VERSION,
    csv_text,
    hamsandwich_report,
    obstruction_csv,
    partition_report,
    recursion_report,
    serialize_to_json,
    trees_csv,
    write_atomic,
)
from .svg import render_partition

__all__ = [
    'SCHEMA_VERSION',
    'csv_text',
    'hamsandwich_report',
    'obstruction_csv',
    'partition_report',
    'recursion_report',
    'serialize_to_json',
    'trees_csv',
    'write_atomic',
    'render_partition',
]
