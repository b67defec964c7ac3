import math
from dataclasses import dataclass

from bubforge.engine.errors import ValidationError
from bubforge.engine.features.feature_vector import wrap_angle
from bubforge.engine.imgproc.geometry import Moments

ISOTROPY_TOLERANCE = 1e-6


@dataclass(frozen=True)
class EllipseFit:
    a: float
    b: float
    phi: float


def fit_ellipse(mom: Moments) -> EllipseFit:
    """
    Equal-second-moment ellipse of a mask.

    Semi-axes are ``2 sqrt(lambda)`` of the moment covariance eigenvalues; the orientation is
    set to 0 when the eigenvalues differ by less than ``1e-6 * A``.

    Raises:
        ValidationError: If the minor eigenvalue is not positive ("degenerate mask").
    """
    half_sum = 0.5 * (mom.mu20 + mom.mu02)
    radius = math.hypot(0.5 * (mom.mu20 - mom.mu02), mom.mu11)
    lam1 = half_sum + radius
    lam2 = half_sum - radius
    if lam2 <= 0.0:
        raise ValidationError("degenerate mask")
    if lam1 - lam2 < ISOTROPY_TOLERANCE * mom.area:
        phi = 0.0
    else:
        phi = wrap_angle(0.5 * math.atan2(2.0 * mom.mu11, mom.mu20 - mom.mu02))
    return EllipseFit(a=2.0 * math.sqrt(lam1), b=2.0 * math.sqrt(lam2), phi=phi)


def aspect_ratio(fit: EllipseFit) -> float:
    return fit.b / fit.a
