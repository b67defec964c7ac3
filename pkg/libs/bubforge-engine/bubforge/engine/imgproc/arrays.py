import numpy as np
from numpy.typing import ArrayLike, NDArray

from bubforge.engine.errors import ValidationError

Raster = NDArray[np.float64]
BitMask = NDArray[np.bool_]
LabelMap = NDArray[np.int32]


def as_raster(img: ArrayLike) -> Raster:
    """Validates and converts ``img`` to a 2-D float64 raster in [0, 1]."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValidationError(f"raster must be a nonempty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
        raise ValidationError("raster values must lie in [0, 1]")
    return arr


def as_mask(mask: ArrayLike) -> BitMask:
    """Converts ``mask`` to a 2-D boolean array."""
    arr = np.asarray(mask, dtype=bool)
    if arr.ndim != 2:
        raise ValidationError(f"mask must be a 2-D array, got shape {arr.shape}")
    return arr
