"""Raster primitives shared by every bubforge module.

Rasters are ``float64`` arrays of shape (height, width) with values in [0, 1], bit masks are
``bool`` arrays and label maps ``int32`` arrays of the same shape.
"""

from bubforge.engine.imgproc.codecs import read_pbm, read_pgm, write_pbm, write_pgm
from bubforge.engine.imgproc.geometry import (
    Moments,
    central_moments,
    contour_perimeter,
    resize_bilinear,
    trace_boundary,
)
from bubforge.engine.imgproc.morphology import (
    connected_components,
    distance_transform,
    skeletonize,
    watershed_count,
)
from bubforge.engine.imgproc.arrays import BitMask, LabelMap, Raster, as_mask, as_raster
from bubforge.engine.imgproc.threshold import Threshold, threshold_adaptive, threshold_otsu

__all__ = [
    "BitMask",
    "LabelMap",
    "Moments",
    "Raster",
    "Threshold",
    "as_mask",
    "as_raster",
    "central_moments",
    "connected_components",
    "contour_perimeter",
    "distance_transform",
    "read_pbm",
    "read_pgm",
    "resize_bilinear",
    "skeletonize",
    "threshold_adaptive",
    "threshold_otsu",
    "trace_boundary",
    "watershed_count",
    "write_pbm",
    "write_pgm",
]
