import numpy as np
import pytest

from bubforge.engine.bubdb.database import BubbleDb, query_linear, query_nearest
from bubforge.engine.bubdb.kdtree import FeatureKDTree, linear_scan
from bubforge.engine.errors import ValidationError
from bubforge.engine.features.feature_vector import FeatureVector


def test_tree_equals_linear_scan(random_features, rng):
    # ARRANGE
    features = random_features(1000)
    targets = random_features(100)
    tree = FeatureKDTree(features)

    # ACT
    mismatches = []
    for row in targets:
        target = FeatureVector.from_sequence(row)
        weights = rng.uniform(0.0, 2.0, 4)
        index, _ = tree.query(target, weights)
        expected = linear_scan(features, target, weights)
        if index != expected:
            mismatches.append((index, expected))

    # ASSERT
    assert mismatches == [], "k-d tree must agree with the brute-force scan on every query"


def test_phi_wraps_across_the_period(random_features):
    # ARRANGE: stored phi just below +pi/2 is nearest to a query just above -pi/2
    features = random_features(200)
    features[:, 1] = np.clip(features[:, 1], -1.0, 1.0)
    features[17] = [0.7, 1.55, 0.9, 0.5]
    tree = FeatureKDTree(features)

    # ACT
    index, distance = tree.query(FeatureVector(0.7, -1.55, 0.9, 0.5))

    # ASSERT
    assert index == 17
    assert distance == pytest.approx((np.pi - 3.1) / (np.pi / 2))


def test_exact_match_is_found(random_features):
    features = random_features(300)
    tree = FeatureKDTree(features, leaf_size=4)

    index, distance = tree.query(FeatureVector.from_sequence(features[123]))

    assert index == 123
    assert distance == pytest.approx(0.0, abs=1e-12)


def test_ties_go_to_the_lowest_index():
    # ARRANGE
    features = np.array([[0.9, 0.0, 0.9, 0.1]] + [[0.5, 0.2, 0.8, 0.4]] * 40)
    tree = FeatureKDTree(features, leaf_size=2)

    # ACT
    index, _ = tree.query(FeatureVector(0.5, 0.2, 0.8, 0.4))

    # ASSERT
    assert index == 1


def test_zero_weights_ignore_components():
    features = np.array([[0.5, 0.1, 0.6, 0.1], [0.6, -1.0, 0.9, 0.9], [0.9, 1.2, 0.7, 0.5]])

    index, _ = FeatureKDTree(features).query(FeatureVector(0.62, 0.1, 0.6, 0.1), (1, 0, 0, 0))

    assert index == 1


def test_empty_tree():
    assert FeatureKDTree(np.zeros((0, 4))).query(FeatureVector(0.5, 0.0, 0.5, 0.5)) == (-1, float("inf"))


def test_database_queries(record_db):
    target = record_db[5].features

    assert query_nearest(record_db, target) == 5
    assert query_linear(record_db, target) == 5


def test_query_on_empty_database():
    db = BubbleDb(records=[], side=8)

    with pytest.raises(ValidationError, match="empty database"):
        query_nearest(db, FeatureVector(0.5, 0.0, 0.5, 0.5))


def test_invalid_query_weights(record_db):
    with pytest.raises(ValidationError, match="weights"):
        query_nearest(record_db, record_db[0].features, (1.0, -1.0, 1.0, 1.0))
