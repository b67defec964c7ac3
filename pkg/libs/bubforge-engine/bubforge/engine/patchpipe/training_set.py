import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional

from tqdm import tqdm

from bubforge.engine.errors import ValidationError
from bubforge.engine.imgproc.arrays import Raster
from bubforge.engine.models.bubble_record import TrainingRecord
from bubforge.engine.patchpipe.classifier import classify
from bubforge.engine.patchpipe.normalize import normalize_patch
from bubforge.engine.patchpipe.patch import Patch, segment_patches
from bubforge.engine.patchpipe.settings import PatchSettings

logger = logging.getLogger(__name__)


def _process(patch: Patch, settings: PatchSettings) -> Optional[TrainingRecord]:
    verdict = classify(patch, settings)
    if not verdict.is_single:
        return None
    try:
        return normalize_patch(patch, settings)
    except ValidationError as e:
        logger.debug("dropping patch at %s: %s", patch.origin, e)
        return None


def build_training_set(
    images: Iterable[Raster],
    settings: Optional[PatchSettings] = None,
    threads: int = 1,
    progress: bool = False,
) -> List[TrainingRecord]:
    """
    Segments, classifies and normalizes every image, keeping single-bubble records.

    Args:
        images: Flow images.
        settings: Pipeline calibration.
        threads: Worker threads for per-patch processing; output order is unaffected.
        progress: Show a progress bar over images.

    Returns:
        list: Training records in image order, then patch order.
    """
    settings = settings or PatchSettings()
    records: List[TrainingRecord] = []
    n_patches = 0
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for img in tqdm(images, desc="extract", unit="img", disable=not progress):
            patches = segment_patches(img, settings)
            n_patches += len(patches)
            for record in pool.map(lambda p: _process(p, settings), patches):
                if record is not None:
                    records.append(record)
    logger.info("training set: %d single-bubble records from %d patches", len(records), n_patches)
    return records
