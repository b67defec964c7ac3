from typing import NamedTuple, Optional

import numpy as np
from scipy import ndimage
from skimage import filters

from bubforge.engine.errors import ValidationError
from bubforge.engine.imgproc.arrays import BitMask, Raster, as_mask, as_raster

OTSU_BINS = 256


class Threshold(NamedTuple):
    value: float
    degenerate: bool


def threshold_otsu(img: Raster, region: Optional[BitMask] = None) -> Threshold:
    """
    Otsu threshold over the whole image or over ``region``.

    Pixels with intensity ``<= value`` form the dark class.

    Args:
        img: Raster in [0, 1].
        region: Optional mask restricting the pixels considered.

    Returns:
        Threshold: The value maximizing between-class variance; ``degenerate`` is set when
        the considered pixels are constant, in which case ``value`` is that constant.

    Raises:
        ValidationError: If ``region`` selects no pixel ("empty region").
    """
    img = as_raster(img)
    if region is not None:
        region = as_mask(region)
        if region.shape != img.shape:
            raise ValidationError("region and image shapes differ")
        values = img[region]
    else:
        values = img.ravel()
    if values.size == 0:
        raise ValidationError("empty region")
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        return Threshold(lo, True)
    return Threshold(float(filters.threshold_otsu(values, nbins=OTSU_BINS)), False)


def local_mean(img: Raster, window: int) -> Raster:
    """Mean over a ``window``-sized square clamped to the image (border windows shrink)."""
    total = ndimage.uniform_filter(img, size=window, mode="constant", cval=0.0)
    support = ndimage.uniform_filter(np.ones_like(img), size=window, mode="constant", cval=0.0)
    return total / support


def threshold_adaptive(img: Raster, window: int, offset: float) -> BitMask:
    """
    Dark-on-bright adaptive threshold: pixel set iff ``img < local_mean(window) - offset``.

    Raises:
        ValidationError: If ``window`` is even, below 3, or above twice the smaller image side.
    """
    img = as_raster(img)
    if window < 3 or window % 2 == 0:
        raise ValidationError(f"window must be odd and >= 3, got {window}")
    if window > 2 * min(img.shape):
        raise ValidationError(
            f"window {window} larger than twice the smaller image side {min(img.shape)}"
        )
    return img < local_mean(img, window) - offset
