from bubforge.engine.patchpipe.classifier import CLUSTER, PatchVerdict, classify, modal_vote
from bubforge.engine.patchpipe.counters import (
    AbstractBubbleCounter,
    AdaptiveThresholdCounter,
    SkeletonCounter,
    WatershedCounter,
    count_adaptive,
    count_skeleton,
    count_watershed,
)
from bubforge.engine.patchpipe.normalize import derive_mask, normalize_patch
from bubforge.engine.patchpipe.patch import Patch, segment_patches
from bubforge.engine.patchpipe.settings import PatchSettings, load_patch_settings
from bubforge.engine.patchpipe.training_set import build_training_set

__all__ = [
    "AbstractBubbleCounter",
    "AdaptiveThresholdCounter",
    "CLUSTER",
    "Patch",
    "PatchSettings",
    "PatchVerdict",
    "SkeletonCounter",
    "WatershedCounter",
    "build_training_set",
    "classify",
    "count_adaptive",
    "count_skeleton",
    "count_watershed",
    "derive_mask",
    "load_patch_settings",
    "modal_vote",
    "normalize_patch",
    "segment_patches",
]
