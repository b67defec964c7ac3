import math

import numpy as np
import pytest

from bubforge.engine.errors import ValidationError
from bubforge.engine.features.feature_vector import FeatureVector
from bubforge.engine.features.interpolation import feature_distance, feature_distances, interpolate

K_I = FeatureVector(0.9, 0.2, 0.95, 0.6)
K_J = FeatureVector(0.5, -0.2, 0.75, 0.2)


def test_interpolation_endpoints_are_exact():
    assert interpolate(K_I, K_J, 1.0) == K_I
    assert interpolate(K_I, K_J, 0.0) == K_J


def test_interpolation_midpoint():
    k = interpolate(K_I, K_J, 0.5)

    assert k.e == pytest.approx(0.7)
    assert k.phi == pytest.approx(0.0, abs=1e-12)
    assert k.psi == pytest.approx(0.85)
    assert k.m == pytest.approx(0.4)


def test_interpolation_takes_the_shorter_arc():
    k_i = FeatureVector(0.5, 1.5, 0.9, 0.5)
    k_j = FeatureVector(0.5, -1.5, 0.9, 0.5)

    k = interpolate(k_i, k_j, 0.5)

    assert abs(k.phi) == pytest.approx(math.pi / 2, abs=1e-9)


@pytest.mark.parametrize("beta", [-0.1, 1.5])
def test_interpolation_weight_range(beta):
    with pytest.raises(ValidationError, match="beta"):
        interpolate(K_I, K_J, beta)


def test_distance_to_self_is_zero():
    assert feature_distance(K_I, K_I) == 0.0


def test_phi_distance_wraps():
    k1 = FeatureVector(0.5, 1.5, 0.9, 0.5)
    k2 = FeatureVector(0.5, -1.5, 0.9, 0.5)

    assert feature_distance(k1, k2) == pytest.approx((math.pi - 3.0) / (math.pi / 2))


def test_weights_select_components():
    assert feature_distance(K_I, K_J, (1, 0, 0, 0)) == pytest.approx(0.4)
    assert feature_distance(K_I, K_J, (0, 0, 0, 1)) == pytest.approx(0.4)


def test_vectorized_distances_match_pairwise(random_features):
    rows = random_features(20)
    target = FeatureVector.from_sequence(rows[0])

    d = feature_distances(target, rows, (1.0, 0.5, 2.0, 1.0))

    expected = [feature_distance(target, FeatureVector.from_sequence(r), (1.0, 0.5, 2.0, 1.0)) for r in rows]
    np.testing.assert_allclose(d, expected)
    assert d[0] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("weights", [(1, 1, 1), (1, -1, 1, 1), (1, float("inf"), 1, 1)])
def test_invalid_weights(weights):
    with pytest.raises(ValidationError, match="weights"):
        feature_distance(K_I, K_J, weights)
