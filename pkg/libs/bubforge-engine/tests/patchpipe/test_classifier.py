import numpy as np
import pytest

from bubforge.engine.patchpipe.classifier import CLUSTER, classify, modal_vote, quality_issue
from bubforge.engine.patchpipe.counters import WatershedCounter
from bubforge.engine.patchpipe.patch import Patch, segment_patches
from bubforge.engine.patchpipe.settings import PatchSettings


@pytest.mark.parametrize(
    "counts, expected",
    [
        ((1, 1, 2), 1),
        ((2, 3, 2), 2),
        ((3, 3, 3), 3),
        ((1, 2, 3), CLUSTER),
    ],
)
def test_modal_vote(counts, expected):
    assert modal_vote(counts) == expected


def test_single_bubble_is_kept(single_bubble_image):
    # ARRANGE
    patches = segment_patches(single_bubble_image)

    # ACT
    verdict = classify(patches[0])

    # ASSERT
    assert len(patches) == 1
    assert verdict.is_single, f"counts {verdict.n1, verdict.n2, verdict.n3}: {verdict.reason}"


def test_overlapping_pair_is_rejected(bubble_pair_image):
    # ARRANGE
    patches = segment_patches(bubble_pair_image)

    # ACT
    verdict = classify(patches[0])

    # ASSERT
    assert len(patches) == 1, "the overlapping pair forms one foreground region"
    assert verdict.is_cluster
    assert verdict.n1 == 2, "watershed must split the pair at its neck"


def test_watershed_counts_overlapping_disks(make_disk):
    mask = make_disk((40, 48), 15, 20, 10) | make_disk((40, 48), 31, 20, 10)
    patch = Patch(image=np.where(mask, 0.3, 0.88), mask=mask, origin=(0, 0))

    assert WatershedCounter().count(patch) == 2


def test_small_patch_fails_quality_filter():
    mask = np.zeros((8, 8), dtype=bool)
    mask[3:5, 3:5] = True
    patch = Patch(image=np.where(mask, 0.3, 0.88), mask=mask, origin=(0, 0))

    issue = quality_issue(patch, PatchSettings())

    assert issue is not None and issue.startswith("area")


def test_quality_filter_rejects_low_solidity():
    # ARRANGE: an L-shaped region
    mask = np.zeros((30, 30), dtype=bool)
    mask[2:28, 2:8] = True
    mask[22:28, 2:28] = True
    patch = Patch(image=np.where(mask, 0.3, 0.88), mask=mask, origin=(0, 0))

    # ACT
    issue = quality_issue(patch, PatchSettings())

    # ASSERT
    assert issue is not None and issue.startswith("solidity")
