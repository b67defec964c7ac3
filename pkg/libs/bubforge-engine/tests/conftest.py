import os

import numpy as np
import pytest

from bubforge.engine.bubdb.database import BubbleDb
from bubforge.engine.ccarender.params import CcaParams, CorpusSettings
from bubforge.engine.ccarender.render import render
from bubforge.engine.features.descriptors import extract_features
from bubforge.engine.features.feature_vector import FeatureVector
from bubforge.engine.gan.config import tiny_config
from bubforge.engine.gan.model import GanModel
from bubforge.engine.models.bubble_record import BubbleRecord

SLOW = os.environ.get("BUBFORGE_SLOW") == "1"


def disk(shape, cx, cy, r):
    """Boolean disk of radius ``r`` around the pixel-center point (cx, cy)."""
    rows, cols = np.indices(shape)
    return (cols - cx) ** 2 + (rows - cy) ** 2 <= r * r


def bubble_record(a, b, phi=0.0, m=0.3, side=48):
    """A noise-free rendered bubble as a database record, features extracted from pixels."""
    img, mask = render(CcaParams(a=a, b=b, phi=phi, m=m, noise=0.0), side)
    return BubbleRecord(patch=img, mask=mask, features=extract_features(img, mask))


@pytest.fixture
def make_disk():
    return disk


@pytest.fixture
def make_record():
    return bubble_record


@pytest.fixture
def slow():
    """Skips long-running acceptance checks unless BUBFORGE_SLOW=1."""
    if not SLOW:
        pytest.skip("set BUBFORGE_SLOW=1 to run slow acceptance checks")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def rendered_bubble():
    params = CcaParams(a=20.0, b=14.0, phi=0.3, m=0.3, noise=0.0)
    img, mask = render(params, 64)
    return img, mask, params


@pytest.fixture
def small_corpus_settings():
    return CorpusSettings(diameter_range=(24.0, 32.0), margin=4)


@pytest.fixture
def tiny_model():
    model = GanModel.initialize(tiny_config(0))
    model.set_pool(
        [
            FeatureVector(e=0.6, phi=-0.4, psi=0.85, m=0.2),
            FeatureVector(e=0.9, phi=0.5, psi=0.95, m=0.6),
            FeatureVector(e=0.75, phi=1.2, psi=0.9, m=0.4),
        ]
    )
    return model


@pytest.fixture
def record_db():
    """Eight rendered bubbles of varied shape, orientation and edge darkness."""
    shapes = [
        (12.0, 12.0, 0.0, 0.2),
        (14.0, 9.0, 0.0, 0.3),
        (14.0, 9.0, 0.8, 0.3),
        (14.0, 9.0, -0.8, 0.5),
        (15.0, 7.0, 1.4, 0.4),
        (13.0, 11.0, 0.4, 0.6),
        (15.0, 8.0, -1.2, 0.25),
        (12.0, 10.0, 0.0, 0.7),
    ]
    records = [bubble_record(a, b, phi, m) for a, b, phi, m in shapes]
    return BubbleDb.from_records(records, seed=3, config_hash="abc123")


@pytest.fixture
def random_features(rng):
    """Random (n, 4) feature matrix inside the valid ranges."""

    def make(n):
        return np.column_stack(
            [
                rng.uniform(0.3, 1.0, n),
                rng.uniform(-np.pi / 2 + 1e-6, np.pi / 2, n),
                rng.uniform(0.5, 1.0, n),
                rng.uniform(0.0, 1.0, n),
            ]
        )

    return make
