import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from bubforge.engine.ccarender.params import FIRST_HARMONIC, CcaParams
from bubforge.engine.errors import ValidationError
from bubforge.engine.imgproc.arrays import BitMask, Raster

SUPERSAMPLE = 4
FIT_FRACTION = 0.95

Center = Tuple[float, float]


def _radius(params: CcaParams, theta: NDArray[np.float64]) -> NDArray[np.float64]:
    # polar radius of the rotated ellipse, modulated by the wobble harmonics
    t = theta - params.phi
    r = params.a * params.b / np.sqrt((params.b * np.cos(t)) ** 2 + (params.a * np.sin(t)) ** 2)
    modulation = np.ones_like(theta)
    for n, (amplitude, phase) in enumerate(params.wobble, start=FIRST_HARMONIC):
        modulation += amplitude * np.cos(n * t + phase)
    return r * modulation


def coverage(
    params: CcaParams, shape: Tuple[int, int], center: Center
) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Area coverage of the outer shape and of the inner bright shape for each pixel.

    Pixel (row i, col j) covers [j, j+1) x [i, i+1); ``center`` is (x, y) in the same
    continuous coordinates. Coverage is estimated on a 4x4 sub-pixel grid.
    """
    h, w = shape
    offsets = (np.arange(SUPERSAMPLE) + 0.5) / SUPERSAMPLE
    xs = (np.arange(w)[:, None] + offsets[None, :]).ravel()
    ys = (np.arange(h)[:, None] + offsets[None, :]).ravel()
    dx = xs[None, :] - center[0]
    dy = center[1] - ys[:, None]  # y axis up
    rho = np.hypot(dx, dy)
    r_out = _radius(params, np.arctan2(dy, dx))
    outer = rho <= r_out
    inner = rho <= params.inner_scale * r_out

    def pool(samples: NDArray[np.bool_]) -> NDArray[np.float64]:
        return samples.reshape(h, SUPERSAMPLE, w, SUPERSAMPLE).mean(axis=(1, 3))

    return pool(outer), pool(inner)


def _layer(params: CcaParams, shape: Tuple[int, int], center: Center) -> Tuple[Raster, BitMask]:
    c_out, c_in = coverage(params, shape, center)
    img = (1.0 - c_out) * params.i_bg + (c_out - c_in) * params.i_edge + c_in * params.i_in
    return img, c_out >= 0.5


def _add_noise(img: Raster, sigma: float, rng: np.random.Generator) -> Raster:
    if sigma > 0:
        img = img + rng.normal(0.0, sigma, size=img.shape)
    return np.clip(img, 0.0, 1.0)


def render(
    params: CcaParams,
    size: int,
    rng: Optional[np.random.Generator] = None,
    center: Optional[Center] = None,
) -> Tuple[Raster, BitMask]:
    """
    Renders one bubble on a ``size`` x ``size`` canvas.

    Args:
        params: Bubble appearance.
        size: Canvas side in pixels.
        rng: Noise source; a generator seeded with 0 when omitted.
        center: (x, y) of the bubble center; the canvas center when omitted.

    Returns:
        tuple: (image, mask of the outer region).

    Raises:
        ValidationError: If the bubble does not fit in 95% of the canvas ("bubble exceeds canvas").
    """
    if 2.0 * params.extent > FIT_FRACTION * size:
        raise ValidationError(
            f"bubble exceeds canvas: extent {2.0 * params.extent:.1f} px > {FIT_FRACTION} * {size} px"
        )
    if center is None:
        center = (size / 2.0, size / 2.0)
    img, mask = _layer(params, (size, size), center)
    return _add_noise(img, params.noise, rng or np.random.default_rng(0)), mask


def compose(
    shape: Tuple[int, int],
    bubbles: Sequence[Tuple[CcaParams, Center]],
    background: float = 0.88,
    noise: float = 0.02,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[Raster, List[BitMask]]:
    """
    Renders several bubbles on one canvas by per-pixel minimum, then adds noise once.

    Each bubble is rasterized only over its bounding window. Returns the image and the
    outer mask of every bubble (full canvas size, clipped at the canvas border).
    """
    canvas = np.full(shape, background, dtype=np.float64)
    masks: List[BitMask] = []
    h, w = shape
    for params, (cx, cy) in bubbles:
        reach = int(math.ceil(params.extent)) + 2
        x0, x1 = max(0, int(cx) - reach), min(w, int(cx) + reach + 1)
        y0, y1 = max(0, int(cy) - reach), min(h, int(cy) + reach + 1)
        mask = np.zeros(shape, dtype=bool)
        if x0 < x1 and y0 < y1:
            layer, local = _layer(params, (y1 - y0, x1 - x0), (cx - x0, cy - y0))
            layer = layer - params.i_bg + background
            canvas[y0:y1, x0:x1] = np.minimum(canvas[y0:y1, x0:x1], layer)
            mask[y0:y1, x0:x1] = local
        masks.append(mask)
    return _add_noise(canvas, noise, rng or np.random.default_rng(0)), masks
