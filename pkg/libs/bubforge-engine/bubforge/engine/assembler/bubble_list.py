import logging
import math
from dataclasses import dataclass, replace
from typing import List, Sequence, Tuple

import numpy as np

from bubforge.engine.assembler.flow_spec import FlowSpec
from bubforge.engine.assembler.profiles import make_profile
from bubforge.engine.errors import ValidationError
from bubforge.engine.features.feature_vector import HALF_PI, FeatureVector, wrap_angle
from bubforge.engine.features.interpolation import interpolate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BubbleInstance:
    """
    One bubble of a scene.

    ``x``, ``y`` are continuous image coordinates of the center (pixel ``(r, c)`` covers
    ``[c, c + 1) x [r, r + 1)``). ``target`` is the conditioning vector used for the
    database query; its E and phi agree with the semi-axes and the orientation.
    """

    x: float
    y: float
    z: float
    a: float
    b: float
    target: FeatureVector
    record: int = -1
    scale: float = 1.0
    clipped: bool = False

    def __post_init__(self) -> None:
        if not self.a >= self.b > 0:
            raise ValidationError(f"semi-axes must satisfy a >= b > 0, got a={self.a}, b={self.b}")

    @property
    def phi(self) -> float:
        return self.target.phi

    @property
    def diameter(self) -> float:
        return 2.0 * math.sqrt(self.a * self.b)

    def half_extent(self) -> Tuple[float, float]:
        """Half width and half height of the rotated ellipse's bounding box."""
        c, s = math.cos(self.phi), math.sin(self.phi)
        return (
            math.sqrt((self.a * c) ** 2 + (self.b * s) ** 2),
            math.sqrt((self.a * s) ** 2 + (self.b * c) ** 2),
        )

    def bbox(self) -> Tuple[float, float, float, float]:
        """(x_min, y_min, x_max, y_max) of the analytic ellipse."""
        hw, hh = self.half_extent()
        return (self.x - hw, self.y - hh, self.x + hw, self.y + hh)


def sample_diameters(spec: FlowSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    """Equivalent diameters in pixels, unclamped."""
    if spec.size_histogram is None:
        d_mm = spec.median_diameter_mm * np.exp(spec.log_sigma * rng.standard_normal(n))
    else:
        bins = np.asarray(spec.size_histogram, dtype=np.float64)
        which = rng.choice(len(bins), size=n, p=bins[:, 2] / bins[:, 2].sum())
        d_mm = rng.uniform(bins[which, 0], bins[which, 1])
    return d_mm * spec.resolution


def bubble_count(spec: FlowSpec, rng: np.random.Generator) -> int:
    if spec.count is not None:
        return spec.count
    assert spec.number_density is not None
    return int(rng.poisson(spec.number_density * spec.channel_area_mm2))


def sample_bubble_list(
    spec: FlowSpec, rng: np.random.Generator, pool: Sequence[FeatureVector]
) -> List[BubbleInstance]:
    """
    Draws the bubbles of one scene.

    Lateral centers follow the spec's profile, ``y`` and ``z`` are uniform, diameters follow
    the size law clamped to ``[max(4, min_diameter_px), 0.9 * channel width]`` (and further so
    the major axis fits that width), E is uniform over ``aspect_range`` and phi uniform. Psi
    and m come from interpolating two random ``pool`` vectors.

    Raises:
        ValidationError: If the spec admits no bubble or the pool is empty while bubbles
            are requested.
    """
    spec.check_satisfiable()
    n = bubble_count(spec, rng)
    if n == 0:
        return []
    if not pool:
        raise ValidationError("cannot sample bubble appearance from an empty feature pool")

    u = make_profile(spec).sample(rng, n)
    x = spec.left_px + u * spec.channel_width_px
    y = rng.uniform(0.0, spec.height, size=n)
    z = rng.uniform(0.0, 1.0, size=n)
    aspect = rng.uniform(*spec.aspect_range, size=n)
    phi = rng.uniform(-HALF_PI, HALF_PI, size=n)
    low, high = spec.diameter_bounds_px
    d = np.clip(sample_diameters(spec, rng, n), low, high * np.sqrt(aspect))
    pairs = rng.integers(len(pool), size=(n, 2))
    betas = rng.uniform(0.0, 1.0, size=n)

    bubbles = []
    for i in range(n):
        mixed = interpolate(pool[pairs[i, 0]], pool[pairs[i, 1]], float(betas[i]))
        root = math.sqrt(aspect[i])
        target = FeatureVector(e=float(aspect[i]), phi=wrap_angle(float(phi[i])), psi=mixed.psi, m=mixed.m)
        bubbles.append(
            BubbleInstance(
                x=float(x[i]),
                y=float(y[i]),
                z=float(z[i]),
                a=float(d[i]) / (2.0 * root),
                b=float(d[i]) * root / 2.0,
                target=target,
            )
        )
    return bubbles


def place_with_boundary(inst: BubbleInstance, spec: FlowSpec) -> BubbleInstance:
    """
    Applies the wall and image-edge rules.

    A bubble crossing a channel wall is shifted laterally by the minimal amount that brings
    its full extent inside. A bubble crossing the top or bottom image edge keeps its place
    and is flagged for cropping. Corner cases get both.
    """
    hw, hh = inst.half_extent()
    left, right = spec.left_px, spec.right_px
    if 2.0 * hw > right - left:
        raise ValidationError(f"bubble {2.0 * hw:.1f} px wide does not fit the channel")
    x = inst.x
    if x - hw < left:
        x = left + hw
    elif x + hw > right:
        x = right - hw
    clipped = inst.y - hh < 0.0 or inst.y + hh > spec.height
    if x != inst.x or clipped:
        logger.debug("bubble at (%.1f, %.1f) moved to x=%.1f, clipped=%s", inst.x, inst.y, x, clipped)
    return replace(inst, x=x, clipped=clipped)
