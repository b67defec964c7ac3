import numpy as np
import pytest

from bubforge.engine.errors import ValidationError
from bubforge.engine.features.feature_vector import FeatureVector
from bubforge.engine.models.bubble_record import BubbleRecord

K = FeatureVector(0.8, 0.0, 0.9, 0.3)


def test_background_level_is_the_border_median():
    patch = np.full((10, 10), 0.9)
    patch[3:7, 3:7] = 0.2

    record = BubbleRecord(patch=patch, mask=patch < 0.5, features=K)

    assert record.side == 10
    assert record.background_level() == pytest.approx(0.9)


def test_record_must_be_square():
    with pytest.raises(ValidationError, match="square"):
        BubbleRecord(patch=np.zeros((4, 6)), mask=np.zeros((4, 6), dtype=bool), features=K)


def test_mask_shape_must_match():
    with pytest.raises(ValidationError, match="shapes differ"):
        BubbleRecord(patch=np.zeros((4, 4)), mask=np.zeros((5, 5), dtype=bool), features=K)
