import numpy as np

from bubforge.engine.assembler.flow_spec import FlowSpec
from bubforge.engine.assembler.labels import LabelSet
from bubforge.engine.imgproc.arrays import Raster


def _axis_kernel(n: int, center: float, sigma: float) -> np.ndarray:
    coords = np.arange(n) + 0.5
    return np.exp(-0.5 * ((coords - center) / sigma) ** 2)


def density_map(labels: LabelSet, spec: FlowSpec) -> Raster:
    """
    Sum of isotropic Gaussians (sigma ``spec.density_sigma``) at the bubble centers.

    Each kernel is renormalized to unit mass over the image, so the map integrates to the
    bubble count however close a bubble sits to the border.
    """
    out = np.zeros((spec.height, spec.width), dtype=np.float64)
    for label in labels.labels:
        gy = _axis_kernel(spec.height, label.y, spec.density_sigma)
        gx = _axis_kernel(spec.width, label.x, spec.density_sigma)
        mass = gy.sum() * gx.sum()
        if mass > 0:
            out += np.outer(gy, gx) / mass
    return out
