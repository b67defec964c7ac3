import logging
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Tuple

from skimage import measure

from bubforge.engine.patchpipe.counters import (
    AdaptiveThresholdCounter,
    SkeletonCounter,
    WatershedCounter,
)
from bubforge.engine.patchpipe.patch import Patch
from bubforge.engine.patchpipe.settings import PatchSettings

logger = logging.getLogger(__name__)

CLUSTER = -1


@dataclass(frozen=True)
class PatchVerdict:
    """Counter predictions and the combined verdict; ``n == CLUSTER`` marks a rejected patch."""

    n1: int
    n2: int
    n3: int
    n: int
    reason: str = ""

    @property
    def is_single(self) -> bool:
        return self.n == 1

    @property
    def is_cluster(self) -> bool:
        return self.n != 1


def modal_vote(counts: Tuple[int, int, int]) -> int:
    """Value shared by at least two counters, or CLUSTER when all three differ."""
    value, freq = Counter(counts).most_common(1)[0]
    return value if freq >= 2 else CLUSTER


def quality_issue(p: Patch, settings: PatchSettings) -> Optional[str]:
    """Why the patch fails the single-bubble quality filters, or None."""
    area = p.area
    patch_area = p.mask.size
    if area < settings.min_area:
        return f"area {area} < {settings.min_area}"
    if area > settings.max_fill * patch_area:
        return f"area {area} > {settings.max_fill} * patch area {patch_area}"
    solidity = float(measure.regionprops(p.mask.astype(int))[0].solidity)
    if solidity < settings.min_solidity:
        return f"solidity {solidity:.3f} < {settings.min_solidity}"
    return None


def classify(p: Patch, settings: Optional[PatchSettings] = None) -> PatchVerdict:
    """
    Modal vote of the watershed, skeleton and adaptive-threshold counters.

    All three distinct gives CLUSTER. A single-bubble vote is kept only if the patch also
    passes the solidity and area filters.
    """
    settings = settings or PatchSettings()
    counts = (
        WatershedCounter(settings).count(p),
        SkeletonCounter(settings).count(p),
        AdaptiveThresholdCounter(settings).count(p),
    )
    n = modal_vote(counts)
    reason = "no majority" if n == CLUSTER else ""
    if n == 1:
        issue = quality_issue(p, settings)
        if issue is not None:
            n, reason = CLUSTER, issue
    verdict = PatchVerdict(*counts, n=n, reason=reason)
    logger.debug("patch at %s: counts %s -> %s %s", p.origin, counts, n, reason)
    return verdict
