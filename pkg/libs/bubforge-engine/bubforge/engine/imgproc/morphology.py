from typing import Optional, Tuple

import numpy as np
from scipy import ndimage
from skimage import morphology, segmentation

from bubforge.engine.errors import ValidationError
from bubforge.engine.imgproc.arrays import BitMask, LabelMap, Raster, as_mask

WATERSHED_H_FRACTION = 0.15

_STRUCTURES = {
    4: ndimage.generate_binary_structure(2, 1),
    8: ndimage.generate_binary_structure(2, 2),
}


def connected_components(mask: BitMask, connectivity: int = 8) -> Tuple[LabelMap, int]:
    """
    Labels maximal connected regions 1..n in raster-scan order of their first pixel.

    Args:
        mask: Binary mask.
        connectivity: 4 or 8.

    Returns:
        tuple: (label map with background 0, number of components n).
    """
    if connectivity not in _STRUCTURES:
        raise ValidationError(f"connectivity must be 4 or 8, got {connectivity}")
    labels, n = ndimage.label(as_mask(mask), structure=_STRUCTURES[connectivity])
    return labels.astype(np.int32), int(n)


def distance_transform(mask: BitMask) -> Raster:
    """Exact Euclidean distance of every set pixel to the nearest unset pixel."""
    mask = as_mask(mask)
    if not mask.any():
        return np.zeros(mask.shape, dtype=np.float64)
    if mask.all():
        # no unset pixel inside: measure to the pixels just outside the image
        padded = ndimage.distance_transform_edt(np.pad(mask, 1))
        return np.asarray(padded, dtype=np.float64)[1:-1, 1:-1]
    return np.asarray(ndimage.distance_transform_edt(mask), dtype=np.float64)


def watershed_count(
    dist: Raster, mask: BitMask, h: Optional[float] = None
) -> Tuple[int, LabelMap]:
    """
    Counts catchment basins of ``-dist`` inside ``mask`` after h-maxima suppression.

    Args:
        dist: Distance map of ``mask``.
        mask: Region to flood.
        h: Minimum peak dynamic; maxima shallower than ``h`` merge into their neighbors.
            Defaults to ``0.15 * max(dist)``.

    Returns:
        tuple: (basin count N1, basin label map). N1 >= 1 whenever the mask is nonempty.
    """
    mask = as_mask(mask)
    dist = np.asarray(dist, dtype=np.float64)
    if dist.shape != mask.shape:
        raise ValidationError("distance map and mask shapes differ")
    if h is not None and h < 0:
        raise ValidationError(f"h must be >= 0, got {h}")
    if not mask.any():
        return 0, np.zeros(mask.shape, dtype=np.int32)

    dist = np.where(mask, dist, 0.0)
    if h is None:
        h = WATERSHED_H_FRACTION * float(dist.max())
    if h > 0:
        peaks = morphology.h_maxima(dist, h).astype(bool)
    else:
        peaks = morphology.local_maxima(dist).astype(bool)
    peaks &= mask
    markers, n = ndimage.label(peaks, structure=_STRUCTURES[8])

    # components whose relief never reaches h still get one basin, seeded at their peak
    components, n_comp = ndimage.label(mask, structure=_STRUCTURES[8])
    for comp in range(1, n_comp + 1):
        region = components == comp
        if not markers[region].any():
            n += 1
            flat = np.where(region, dist, -1.0)
            markers[np.unravel_index(int(np.argmax(flat)), flat.shape)] = n

    basins = segmentation.watershed(-dist, markers, mask=mask, connectivity=2)
    count = len(np.unique(basins[basins > 0]))
    return count, basins.astype(np.int32)


def skeletonize(mask: BitMask) -> BitMask:
    """Zhang-Suen thinning to a 1-px-wide, topology-preserving 8-connected skeleton."""
    mask = as_mask(mask)
    if not mask.any():
        return mask.copy()
    return np.asarray(morphology.skeletonize(mask, method="zhang"), dtype=bool)
