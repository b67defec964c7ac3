from typing import Optional

import numpy as np
from scipy import ndimage

from bubforge.engine.errors import ValidationError
from bubforge.engine.features.descriptors import extract_features
from bubforge.engine.imgproc.arrays import BitMask, Raster
from bubforge.engine.imgproc.geometry import central_moments, resize_bilinear
from bubforge.engine.imgproc.morphology import connected_components
from bubforge.engine.imgproc.threshold import threshold_otsu
from bubforge.engine.models.bubble_record import TrainingRecord
from bubforge.engine.patchpipe.patch import Patch
from bubforge.engine.patchpipe.settings import PatchSettings


def largest_component(mask: BitMask) -> BitMask:
    labels, n = connected_components(mask, connectivity=8)
    if n == 0:
        return mask.copy()
    areas = np.bincount(labels.ravel())[1:]
    return labels == int(np.argmax(areas)) + 1


def derive_mask(img: Raster, split_gap: float = 0.15, keep_largest: bool = True) -> BitMask:
    """
    Bubble mask of a normalized patch.

    A first Otsu split separates the darkest class. If the bright class still holds two
    populations whose means differ by at least ``split_gap`` (bright core and background),
    a second Otsu split of the bright class sets the boundary. Holes are filled and only the
    largest 8-connected component is kept, unless ``keep_largest`` is false.
    """
    first = threshold_otsu(img)
    if first.degenerate:
        return np.zeros(img.shape, dtype=bool)
    cut = first.value
    bright = img > cut
    if np.count_nonzero(bright) >= 2:
        second = threshold_otsu(img, bright)
        if not second.degenerate:
            upper = img[bright]
            low, high = upper[upper <= second.value], upper[upper > second.value]
            if low.size and high.size and float(high.mean() - low.mean()) >= split_gap:
                cut = second.value
    mask = np.asarray(ndimage.binary_fill_holes(img <= cut), dtype=bool)
    if not keep_largest:
        return mask
    return np.asarray(ndimage.binary_fill_holes(largest_component(mask)), dtype=bool)


def _square_crop(img: Raster, cx: float, cy: float, side: int, fill: float) -> Raster:
    # pixel-center coordinates; out-of-bounds area padded with the background intensity
    x0 = int(round(cx + 0.5 - side / 2.0))
    y0 = int(round(cy + 0.5 - side / 2.0))
    out = np.full((side, side), fill, dtype=np.float64)
    h, w = img.shape
    sx0, sy0 = max(0, x0), max(0, y0)
    sx1, sy1 = min(w, x0 + side), min(h, y0 + side)
    if sx0 < sx1 and sy0 < sy1:
        out[sy0 - y0 : sy1 - y0, sx0 - x0 : sx1 - x0] = img[sy0:sy1, sx0:sx1]
    return out


def normalize_patch(p: Patch, settings: Optional[PatchSettings] = None) -> TrainingRecord:
    """
    Turns a single-bubble patch into a square training record.

    Stray foreground fragments are painted over with the border-median background, the
    bubble is cropped square (side ``(1 + 2 * margin) * max(bbox)``) about its centroid,
    resized to ``record_side``, scaled so the background sits at ``background_target`` and
    its mask and features are derived again from the result.

    Raises:
        ValidationError: If no usable bubble mask can be derived.
    """
    settings = settings or PatchSettings()
    background = p.border_median()
    main = largest_component(p.mask)

    # everything darker than the background that is not the bubble is noise
    dark = p.image < background - settings.background_offset
    others = np.asarray(ndimage.binary_fill_holes(dark | main), dtype=bool)
    labels, _ = connected_components(others, connectivity=8)
    keep = np.unique(labels[main])
    stray = (labels > 0) & ~np.isin(labels, keep[keep > 0])
    cleaned = np.where(stray, background, p.image)

    mom = central_moments(main)
    rows = np.flatnonzero(main.any(axis=1))
    cols = np.flatnonzero(main.any(axis=0))
    extent = max(rows[-1] - rows[0] + 1, cols[-1] - cols[0] + 1)
    side = max(2, normalization_side(extent, settings.margin_fraction))
    crop = _square_crop(cleaned, mom.cx, mom.cy, side, background)

    patch = resize_bilinear(crop, settings.record_side, settings.record_side)
    border = np.concatenate([patch[0, :], patch[-1, :], patch[1:-1, 0], patch[1:-1, -1]])
    level = float(np.median(border))
    if level > 0:
        patch = np.clip(patch * (settings.background_target / level), 0.0, 1.0)

    mask = derive_mask(patch, settings.mask_split_gap)
    if not mask.any():
        raise ValidationError(f"no bubble mask in patch at {p.origin}")
    return TrainingRecord(patch=patch, mask=mask, features=extract_features(patch, mask))


def normalization_side(extent: int, margin_fraction: float = 0.1) -> int:
    """Square crop side for a bubble bounding box whose larger side is ``extent``."""
    return int(round((1.0 + 2.0 * margin_fraction) * extent))
