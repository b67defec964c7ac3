from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy import ndimage
from skimage import measure, transform

from bubforge.engine.errors import ValidationError
from bubforge.engine.imgproc.arrays import BitMask, Raster, as_mask, as_raster

PIXEL_VARIANCE = 1.0 / 12.0
PERIMETER_TOLERANCE = 1.0

# Freeman directions as (d_row, d_col): 0=E, 1=NE, 2=N, 3=NW, 4=W, 5=SW, 6=S, 7=SE
_DIRECTIONS = ((0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1))


@dataclass(frozen=True)
class Moments:
    """
    Area, centroid and normalized second-order central moments of a mask.

    ``cx``/``cy`` are column/row coordinates of the centroid. The moments use a y axis
    pointing up, so a mask rising to the right has a positive ``mu11``. Each pixel
    contributes ``1/12`` of extra variance per axis.
    """

    area: int
    cx: float
    cy: float
    mu20: float
    mu02: float
    mu11: float


def resize_bilinear(img: Raster, new_w: int, new_h: int) -> Raster:
    """
    Bilinear resize with half-pixel-center alignment (pixel i covers [i, i+1)).

    A 2x downscale equals 2x2 block averaging; the identity resize returns an exact copy.
    """
    img = as_raster(img)
    if new_w < 1 or new_h < 1:
        raise ValidationError(f"target size must be >= 1, got {new_w}x{new_h}")
    if (new_h, new_w) == img.shape:
        return img.copy()
    out = transform.resize(
        img,
        (new_h, new_w),
        order=1,
        mode="edge",
        anti_aliasing=False,
        preserve_range=True,
    )
    return np.clip(out, 0.0, 1.0)


def trace_boundary(mask: BitMask) -> List[Tuple[int, int]]:
    """
    Traces the outer boundary of a single 8-connected component through pixel centers.

    Returns:
        list: Closed chain of (row, col) points (first == last); a single point for a
        one-pixel mask.
    """
    mask = as_mask(mask)
    _, n = ndimage.label(mask, structure=np.ones((3, 3), dtype=bool))
    if n != 1:
        raise ValidationError(f"expected exactly one 8-connected component, found {n}")

    padded = np.pad(mask, 1)
    rows, cols = np.nonzero(padded)
    start = (int(rows[0]), int(cols[0]))
    points = [start]
    current = start
    direction = 7
    first_move = -1
    for _ in range(8 * int(mask.sum()) + 8):
        search = (direction + 7) % 8 if direction % 2 == 0 else (direction + 6) % 8
        for i in range(8):
            d = (search + i) % 8
            step = (current[0] + _DIRECTIONS[d][0], current[1] + _DIRECTIONS[d][1])
            if padded[step]:
                break
        else:
            break  # isolated pixel
        if current == start and d == first_move:
            break
        if first_move < 0:
            first_move = d
        current = step
        direction = d
        points.append(current)
    return [(r - 1, c - 1) for r, c in points]


def contour_perimeter(mask: BitMask, tolerance: float = PERIMETER_TOLERANCE) -> float:
    """
    Length of the outer boundary polygon of a single-component mask.

    The traced chain (axial steps 1, diagonal steps sqrt(2)) is simplified with
    Douglas-Peucker at ``tolerance`` pixels before measuring; straight runs and corners are
    kept exactly, so a 10x10 square measures 36. ``tolerance=0`` measures the raw chain.

    Raises:
        ValidationError: If the mask has zero or several 8-connected components.
    """
    points = np.asarray(trace_boundary(mask), dtype=np.float64)
    if len(points) < 2:
        return 0.0
    if tolerance > 0:
        points = measure.approximate_polygon(points, tolerance=tolerance)
    return float(np.hypot(*np.diff(points, axis=0).T).sum())


def central_moments(mask: BitMask) -> Moments:
    """
    Area, centroid and normalized central moments of the set pixels.

    Raises:
        ValidationError: If the mask is empty.
    """
    mask = as_mask(mask)
    rows, cols = np.nonzero(mask)
    area = rows.size
    if area == 0:
        raise ValidationError("central moments of an empty mask")
    cx = float(cols.mean())
    cy = float(rows.mean())
    dx = cols - cx
    dy = cy - rows  # y axis up
    return Moments(
        area=int(area),
        cx=cx,
        cy=cy,
        mu20=float(np.mean(dx * dx)) + PIXEL_VARIANCE,
        mu02=float(np.mean(dy * dy)) + PIXEL_VARIANCE,
        mu11=float(np.mean(dx * dy)),
    )
