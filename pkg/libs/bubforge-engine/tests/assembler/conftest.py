import pytest

from bubforge.engine.assembler.bubble_list import BubbleInstance
from bubforge.engine.assembler.flow_spec import FlowSpec
from bubforge.engine.assembler.sources import DatabaseBubbleSource
from bubforge.engine.features.feature_vector import FeatureVector


@pytest.fixture
def square_spec():
    """100 x 100 px at 1 px/mm, channel spanning the whole width."""
    return FlowSpec(width=100, height=100, resolution=1.0, channel_right_mm=100.0, count=1)


@pytest.fixture
def channel_spec():
    """160 x 120 px image with channel walls at columns 20 and 140."""
    return FlowSpec(
        width=160,
        height=120,
        resolution=1.0,
        channel_left_mm=20.0,
        channel_right_mm=140.0,
        count=12,
        median_diameter_mm=16.0,
        log_sigma=0.2,
        seed=11,
    )


@pytest.fixture
def db_source(record_db):
    return DatabaseBubbleSource(record_db)


@pytest.fixture
def make_instance():
    def make(x, y, a=10.0, b=10.0, phi=0.0, z=0.5, m=0.3):
        return BubbleInstance(x=x, y=y, z=z, a=a, b=b, target=FeatureVector(e=b / a, phi=phi, psi=0.95, m=m))

    return make
