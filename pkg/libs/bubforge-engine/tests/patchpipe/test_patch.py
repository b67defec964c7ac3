import numpy as np
import pytest

from bubforge.engine.errors import ValidationError
from bubforge.engine.patchpipe.patch import Patch, segment_patches
from bubforge.engine.patchpipe.settings import PatchSettings, load_patch_settings


def test_segment_patches_pads_the_region(single_bubble_image):
    # ACT
    patches = segment_patches(single_bubble_image)

    # ASSERT
    assert len(patches) == 1
    p = patches[0]
    assert not p.mask[0, :].any() and not p.mask[:, 0].any(), "padding keeps the region off the crop edge"
    assert p.border_median() == pytest.approx(0.88, abs=0.01)


def test_blank_image_has_no_patches():
    assert segment_patches(np.full((64, 64), 0.88)) == []


def test_regions_below_min_area_are_skipped():
    img = np.full((64, 64), 0.88)
    img[10:13, 10:13] = 0.2

    assert segment_patches(img, PatchSettings(min_area=30)) == []


def test_patch_rejects_empty_mask():
    with pytest.raises(ValidationError, match="empty"):
        Patch(image=np.zeros((4, 4)), mask=np.zeros((4, 4), dtype=bool), origin=(0, 0))


def test_settings_overrides():
    settings = load_patch_settings({"min_area": 12})

    assert settings.min_area == 12
    assert settings.record_side == PatchSettings().record_side


def test_unknown_setting_is_rejected():
    with pytest.raises(ValidationError):
        load_patch_settings({"min_aera": 12})


def test_invalid_setting_is_rejected():
    with pytest.raises(ValidationError, match="max_fill"):
        PatchSettings(max_fill=1.5)
