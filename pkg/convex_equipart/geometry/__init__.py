"""
Geometry module for convex-equipart
"""

from .polygon import (
    COLLINEAR_RTOL,
    ConvexPolygon,
    HalfPlane,
    Point2,
    clip,
    clip_raw,
    hausdorff_distance,
    intersect,
)

__all__ = [
    'COLLINEAR_RTOL',
    'ConvexPolygon',
    'HalfPlane',
    'Point2',
    'clip',
    'clip_raw',
    'hausdorff_distance',
    'intersect',
]
