import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from bubforge.engine.assembler.bubble_list import BubbleInstance
from bubforge.engine.features.ellipse import fit_ellipse
from bubforge.engine.imgproc.arrays import BitMask, Raster
from bubforge.engine.imgproc.geometry import central_moments, resize_bilinear
from bubforge.engine.models.bubble_record import BubbleRecord

TRANSPARENCY_MARGIN = 0.05

Walls = Tuple[float, float]


@dataclass
class Stamp:
    """
    A record resized for one instance and cropped to the canvas and channel walls.

    ``values``/``participates`` cover canvas rows ``row:row + h`` and cols ``col:col + w``.
    ``patch``/``mask`` are the full resized record, before cropping and intensity scaling.
    """

    row: int
    col: int
    values: Raster
    participates: BitMask
    scale: float
    patch: Raster
    mask: BitMask

    @property
    def window(self) -> Tuple[slice, slice]:
        h, w = self.values.shape
        return slice(self.row, self.row + h), slice(self.col, self.col + w)


def record_scale(record: BubbleRecord, inst: BubbleInstance) -> float:
    """Uniform factor mapping the record's fitted semi-major axis onto ``inst.a``."""
    return inst.a / fit_ellipse(central_moments(record.mask)).a


def make_stamp(
    record: BubbleRecord,
    inst: BubbleInstance,
    shape: Tuple[int, int],
    background: Optional[float] = None,
    walls: Optional[Walls] = None,
) -> Stamp:
    """
    Resizes ``record`` so its fitted ellipse matches ``inst`` and aligns its mask centroid
    with the instance center.

    Pixels at least 0.05 darker than the record's background level participate. With
    ``background`` set, intensities are scaled so the record background maps onto it.
    Pixels outside the image, or not fully between ``walls``, are dropped.
    """
    side = max(1, int(round(record.side * record_scale(record, inst))))
    scale = side / record.side
    patch = resize_bilinear(record.patch, side, side)
    mask = resize_bilinear(record.mask.astype(np.float64), side, side) >= 0.5

    mom = central_moments(record.mask)
    col0 = int(round(inst.x - (mom.cx + 0.5) * scale))
    row0 = int(round(inst.y - (mom.cy + 0.5) * scale))

    level = record.background_level()
    participates = patch < level - TRANSPARENCY_MARGIN
    values = patch
    if background is not None and level > 0:
        values = np.clip(patch * (background / level), 0.0, 1.0)

    h, w = shape
    c_lo, c_hi = 0, w
    if walls is not None:
        c_lo = max(c_lo, int(math.ceil(walls[0] - 1e-9)))
        c_hi = min(c_hi, int(math.floor(walls[1] + 1e-9)))
    r0, r1 = max(0, row0), min(h, row0 + side)
    k0, k1 = max(c_lo, col0), min(c_hi, col0 + side)
    r1, k1 = max(r0, r1), max(k0, k1)
    window = (slice(r0 - row0, r1 - row0), slice(k0 - col0, k1 - col0))
    return Stamp(
        row=r0,
        col=k0,
        values=values[window],
        participates=participates[window],
        scale=scale,
        patch=patch,
        mask=mask,
    )


def apply_stamp(canvas: Raster, stamp: Stamp) -> None:
    """Per-pixel minimum of the canvas and the participating stamp pixels, in place."""
    region = canvas[stamp.window]
    np.copyto(region, np.minimum(region, stamp.values), where=stamp.participates)


def paint(
    canvas: Raster,
    record: BubbleRecord,
    inst: BubbleInstance,
    background: Optional[float] = None,
    walls: Optional[Walls] = None,
) -> Raster:
    """
    Composites ``record`` onto a copy of ``canvas`` at ``inst``.

    Painting only darkens, so the result does not depend on the order bubbles are painted in.
    """
    out = np.array(canvas, dtype=np.float64, copy=True)
    apply_stamp(out, make_stamp(record, inst, out.shape, background, walls))
    return out
