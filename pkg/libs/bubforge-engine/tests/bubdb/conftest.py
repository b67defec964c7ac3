import numpy as np
import pytest

from bubforge.engine.features.feature_vector import FeatureVector
from bubforge.engine.models.bubble_record import BubbleRecord


@pytest.fixture
def flat_record():
    """8 x 8 record with hand-set features; the pixels are irrelevant to statistics and search."""

    def make(e=0.8, phi=0.0, psi=0.9, m=0.4):
        mask = np.zeros((8, 8), dtype=bool)
        mask[2:6, 2:6] = True
        return BubbleRecord(
            patch=np.where(mask, 0.3, 0.9),
            mask=mask,
            features=FeatureVector(e=e, phi=phi, psi=psi, m=m),
        )

    return make
