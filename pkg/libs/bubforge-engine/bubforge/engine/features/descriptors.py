import math

import numpy as np

from bubforge.engine.errors import ValidationError
from bubforge.engine.features.ellipse import aspect_ratio, fit_ellipse
from bubforge.engine.features.feature_vector import FeatureVector
from bubforge.engine.imgproc.arrays import BitMask, Raster, as_mask, as_raster
from bubforge.engine.imgproc.geometry import central_moments, contour_perimeter
from bubforge.engine.imgproc.threshold import threshold_otsu

MIN_PERIMETER = 4.0
EDGE_MIN_CONTRAST = 0.1


def circularity(mask: BitMask) -> float:
    """``4 pi A / P^2`` clamped into (0, 1]; masks with a perimeter below 4 use P = 4."""
    mask = as_mask(mask)
    perimeter = max(contour_perimeter(mask), MIN_PERIMETER)
    area = float(mask.sum())
    return min(1.0, 4.0 * math.pi * area / perimeter**2)


def edge_ratio(img: Raster, mask: BitMask) -> float:
    """
    Fraction of mask pixels darker than the in-mask Otsu threshold.

    When the mask holds no two distinct intensity populations (range or Otsu class-mean
    gap below 0.1) the bubble counts as all edge if its mean is below 0.5, else no edge.
    """
    img = as_raster(img)
    mask = as_mask(mask)
    if mask.shape != img.shape:
        raise ValidationError("image and mask shapes differ")
    values = img[mask]
    if values.size == 0:
        raise ValidationError("edge ratio of an empty mask")
    threshold = threshold_otsu(img, mask)
    dark = values <= threshold.value
    bimodal = (
        not threshold.degenerate
        and float(values.max() - values.min()) >= EDGE_MIN_CONTRAST
        and dark.any()
        and (~dark).any()
        and float(values[~dark].mean() - values[dark].mean()) >= EDGE_MIN_CONTRAST
    )
    if not bimodal:
        return 1.0 if float(values.mean()) < 0.5 else 0.0
    return float(np.count_nonzero(dark)) / values.size


def extract_features(img: Raster, mask: BitMask) -> FeatureVector:
    """
    The feature extractor: ``[E, phi, psi, m]`` of a single-component bubble mask.

    Raises:
        ValidationError: If the mask is empty, has several components or is degenerate.
    """
    fit = fit_ellipse(central_moments(mask))
    return FeatureVector(
        e=aspect_ratio(fit),
        phi=fit.phi,
        psi=circularity(mask),
        m=edge_ratio(img, mask),
    )
