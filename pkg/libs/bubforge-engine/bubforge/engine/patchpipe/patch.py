from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import ndimage

from bubforge.engine.errors import ValidationError
from bubforge.engine.imgproc.arrays import BitMask, Raster, as_raster
from bubforge.engine.imgproc.morphology import connected_components
from bubforge.engine.patchpipe.settings import PatchSettings


@dataclass(frozen=True, eq=False)
class Patch:
    """A crop of a flow image holding one connected foreground region."""

    image: Raster
    mask: BitMask
    origin: Tuple[int, int]

    def __post_init__(self) -> None:
        if self.image.shape != self.mask.shape:
            raise ValidationError("patch image and mask shapes differ")
        if not self.mask.any():
            raise ValidationError("patch mask is empty")

    @property
    def area(self) -> int:
        return int(self.mask.sum())

    def border_median(self) -> float:
        img = self.image
        border = np.concatenate([img[0, :], img[-1, :], img[1:-1, 0], img[1:-1, -1]])
        return float(np.median(border))


def estimate_background(img: Raster, window: int) -> Raster:
    """Grey closing with a square window wider than any bubble: dark bubbles vanish."""
    return np.asarray(ndimage.grey_closing(img, size=(window, window), mode="nearest"), dtype=np.float64)


def foreground_mask(img: Raster, settings: PatchSettings) -> BitMask:
    """Pixels darker than the local background by more than the offset, holes filled."""
    smooth = ndimage.gaussian_filter(img, sigma=settings.smoothing_sigma) if settings.smoothing_sigma > 0 else img
    background = estimate_background(smooth, settings.background_window)
    mask = smooth < background - settings.background_offset
    return np.asarray(ndimage.binary_fill_holes(mask), dtype=bool)


def segment_patches(img: Raster, settings: Optional[PatchSettings] = None) -> List[Patch]:
    """
    Splits a flow image into patches, one per 8-connected foreground region of at least
    ``min_area`` pixels, cropped with ``padding`` pixels around the region's bounding box.
    """
    settings = settings or PatchSettings()
    img = as_raster(img)
    labels, _ = connected_components(foreground_mask(img, settings), connectivity=8)
    patches: List[Patch] = []
    for index, window in enumerate(ndimage.find_objects(labels), start=1):
        if window is None:
            continue
        rows, cols = window
        region = labels[window] == index
        if int(region.sum()) < settings.min_area:
            continue
        pad = settings.padding
        y0, y1 = max(0, rows.start - pad), min(img.shape[0], rows.stop + pad)
        x0, x1 = max(0, cols.start - pad), min(img.shape[1], cols.stop + pad)
        patches.append(
            Patch(
                image=img[y0:y1, x0:x1].copy(),
                mask=labels[y0:y1, x0:x1] == index,
                origin=(x0, y0),
            )
        )
    return patches
