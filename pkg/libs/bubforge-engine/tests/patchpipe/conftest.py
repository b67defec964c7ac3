import pytest

from bubforge.engine.ccarender.params import CcaParams
from bubforge.engine.ccarender.render import compose


@pytest.fixture
def single_bubble_image():
    bubble = CcaParams(a=20.0, b=16.0, phi=0.4, m=0.3, noise=0.0)
    img, _ = compose((96, 96), [(bubble, (48.0, 48.0))], noise=0.0)
    return img


@pytest.fixture
def bubble_pair_image():
    # two d=40 bubbles whose centers sit 28 px apart, so their outlines overlap
    bubble = CcaParams(a=20.0, b=20.0, m=0.3, noise=0.0)
    img, _ = compose((96, 112), [(bubble, (42.0, 48.0)), (bubble, (70.0, 48.0))], noise=0.0)
    return img
