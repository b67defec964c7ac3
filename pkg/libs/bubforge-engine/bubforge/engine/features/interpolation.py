import math
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from bubforge.engine.errors import ValidationError
from bubforge.engine.features.feature_vector import HALF_PI, FeatureVector, wrap_angle

DEFAULT_WEIGHTS = (1.0, 1.0, 1.0, 1.0)


def interpolate(k_i: FeatureVector, k_j: FeatureVector, beta: float) -> FeatureVector:
    """
    ``beta * k_i + (1 - beta) * k_j``, with phi moving along the shorter period-pi arc.

    Raises:
        ValidationError: If ``beta`` is outside [0, 1].
    """
    if not 0.0 <= beta <= 1.0:
        raise ValidationError(f"interpolation weight beta={beta} outside [0, 1]")
    if beta == 1.0:
        return k_i
    if beta == 0.0:
        return k_j
    arc = wrap_angle(k_i.phi - k_j.phi)

    def mix(u: float, v: float) -> float:
        return beta * u + (1.0 - beta) * v

    return FeatureVector(
        e=mix(k_i.e, k_j.e),
        phi=wrap_angle(k_j.phi + beta * arc),
        psi=mix(k_i.psi, k_j.psi),
        m=mix(k_i.m, k_j.m),
    )


def check_weights(weights: Sequence[float]) -> NDArray[np.float64]:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (4,) or np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValidationError(f"weights must be 4 finite non-negative reals, got {list(weights)}")
    return w


def feature_distances(
    target: FeatureVector,
    features: ArrayLike,
    weights: Sequence[float] = DEFAULT_WEIGHTS,
) -> NDArray[np.float64]:
    """Weighted distance from ``target`` to every row of an (n, 4) feature array."""
    w = check_weights(weights)
    rows = np.asarray(features, dtype=np.float64).reshape(-1, 4)
    delta = rows - target.to_array()
    dphi = np.abs(delta[:, 1])
    delta[:, 1] = np.minimum(dphi, math.pi - dphi) / HALF_PI
    # row-wise sum keeps each distance independent of how many rows are scored together
    return np.sqrt(np.sum(delta * delta * w, axis=1))


def feature_distance(
    k1: FeatureVector, k2: FeatureVector, weights: Sequence[float] = DEFAULT_WEIGHTS
) -> float:
    """
    Weighted Euclidean distance; the phi term is the period-pi arc over pi/2.
    """
    return float(feature_distances(k1, k2.to_array()[None, :], weights)[0])
