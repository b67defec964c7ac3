"""The three bubble counters whose modal vote classifies a patch."""

import math
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np
from scipy import ndimage

from bubforge.engine.imgproc.arrays import BitMask
from bubforge.engine.imgproc.morphology import (
    connected_components,
    distance_transform,
    skeletonize,
    watershed_count,
)
from bubforge.engine.imgproc.threshold import threshold_adaptive
from bubforge.engine.patchpipe.patch import Patch
from bubforge.engine.patchpipe.settings import PatchSettings

_EIGHT = np.ones((3, 3), dtype=bool)
_NEIGHBORS = np.array([[1, 1, 1], [1, 0, 1], [1, 1, 1]])


class AbstractBubbleCounter(ABC):
    def __init__(self, settings: Optional[PatchSettings] = None):
        """
        Abstract bubble counter.

        Args:
            settings (PatchSettings): Pipeline calibration; packaged defaults when omitted.
        """
        self.settings = settings or PatchSettings()

    @abstractmethod
    def count(self, patch: Patch) -> int:
        """
        Predicts how many bubbles the patch holds.

        Args:
            patch (Patch): The patch to count.

        Returns:
            int: Predicted count, always >= 1.
        """


class WatershedCounter(AbstractBubbleCounter):
    """Basins of the mask's distance map; basins under ``min_area`` join their largest neighbor."""

    def count(self, patch: Patch) -> int:
        mask = patch.mask
        dist = distance_transform(mask)
        h = max(self.settings.watershed_h_fraction * float(dist.max()), self.settings.watershed_h_min)
        _, basins = watershed_count(dist, mask, h=h)
        basins = merge_small_basins(basins, self.settings.min_area)
        return max(1, len(np.unique(basins[basins > 0])))


def merge_small_basins(basins: np.ndarray, min_area: int) -> np.ndarray:
    """Relabels every basin smaller than ``min_area`` to its largest touching basin."""
    basins = basins.copy()
    while True:
        labels, areas = np.unique(basins[basins > 0], return_counts=True)
        if len(labels) <= 1:
            return basins
        small = [(int(a), int(lab)) for lab, a in zip(labels, areas) if a < min_area]
        if not small:
            return basins
        _, label = min(small)
        region = basins == label
        ring = ndimage.binary_dilation(region, structure=_EIGHT) & ~region
        neighbors = basins[ring & (basins > 0)]
        if neighbors.size == 0:
            return basins  # isolated small piece, nothing to join
        area_of = dict(zip(labels.tolist(), areas.tolist()))
        target = max(np.unique(neighbors).tolist(), key=lambda lab: (area_of[lab], -lab))
        basins[region] = target


def neighbor_count(skeleton: BitMask) -> np.ndarray:
    return ndimage.convolve(skeleton.astype(np.int32), _NEIGHBORS, mode="constant") * skeleton


def prune_spurs(skeleton: BitMask, max_length: float) -> BitMask:
    """
    Removes branches that run from an endpoint to a junction in fewer than ``max_length``
    pixels. Branches joining two endpoints (the whole skeleton) are kept.
    """
    skeleton = skeleton.copy()
    h, w = skeleton.shape
    changed = True
    while changed:
        changed = False
        counts = neighbor_count(skeleton)
        endpoints = list(zip(*np.nonzero(counts == 1)))
        for start in endpoints:
            if not skeleton[start]:
                continue
            path = [start]
            previous = None
            current = start
            reached_junction = False
            while len(path) <= max_length:
                r, c = current
                step = None
                for dr in (-1, 0, 1):
                    for dc in (-1, 0, 1):
                        nr, nc = r + dr, c + dc
                        if (dr or dc) and 0 <= nr < h and 0 <= nc < w and skeleton[nr, nc]:
                            if (nr, nc) != previous and (nr, nc) not in path:
                                step = (nr, nc)
                                break
                    if step is not None:
                        break
                if step is None:
                    break
                if counts[step] >= 3:
                    reached_junction = True
                    break
                previous, current = current, step
                path.append(current)
            if reached_junction and len(path) < max_length:
                for pixel in path:
                    skeleton[pixel] = False
                changed = True
                break
    return skeleton


class SkeletonCounter(AbstractBubbleCounter):
    """Half the endpoint count of the pruned skeleton, rounded up."""

    def count(self, patch: Patch) -> int:
        skeleton = skeletonize(patch.mask)
        max_length = self.settings.spur_fraction * math.sqrt(patch.area)
        skeleton = prune_spurs(skeleton, max_length)
        endpoints = int(np.count_nonzero(neighbor_count(skeleton) == 1))
        return max(1, math.ceil(endpoints / 2))


def adaptive_window(patch: Patch) -> int:
    """``ceil(min(w, h) / 2)`` rounded up to odd, at least 3."""
    window = max(3, math.ceil(min(patch.mask.shape) / 2))
    return window if window % 2 == 1 else window + 1


class AdaptiveThresholdCounter(AbstractBubbleCounter):
    """
    Bright bubble cores: mask pixels the dark-on-bright adaptive threshold leaves unset,
    counted as components of at least ``min_area`` pixels.
    """

    def count(self, patch: Patch) -> int:
        window = adaptive_window(patch)
        if window > 2 * min(patch.mask.shape):
            return 1
        dark = threshold_adaptive(patch.image, window, self.settings.adaptive_offset)
        cores = patch.mask & ~dark
        cores = ndimage.binary_opening(cores, structure=_EIGHT)
        labels, n = connected_components(cores, connectivity=8)
        if n == 0:
            return 1
        areas = np.bincount(labels.ravel())[1:]
        return max(1, int(np.count_nonzero(areas >= self.settings.min_area)))


def count_watershed(p: Patch, settings: Optional[PatchSettings] = None) -> int:
    return WatershedCounter(settings).count(p)


def count_skeleton(p: Patch, settings: Optional[PatchSettings] = None) -> int:
    return SkeletonCounter(settings).count(p)


def count_adaptive(p: Patch, settings: Optional[PatchSettings] = None) -> int:
    return AdaptiveThresholdCounter(settings).count(p)
