from dataclasses import dataclass

import numpy as np

from bubforge.engine.errors import ValidationError
from bubforge.engine.features.feature_vector import FeatureVector
from bubforge.engine.imgproc.arrays import BitMask, Raster


@dataclass(frozen=True, eq=False)
class BubbleRecord:
    """
    A normalized single-bubble patch with its mask and extracted features.

    Used both for training records (normalized real or rendered patches) and for the
    generated database entries. ``features`` are always extracted from ``patch``/``mask``.
    """

    patch: Raster
    mask: BitMask
    features: FeatureVector

    def __post_init__(self) -> None:
        if self.patch.ndim != 2 or self.patch.shape[0] != self.patch.shape[1]:
            raise ValidationError(f"record patch must be square, got shape {self.patch.shape}")
        if self.mask.shape != self.patch.shape:
            raise ValidationError("record patch and mask shapes differ")

    @property
    def side(self) -> int:
        return int(self.patch.shape[0])

    def background_level(self) -> float:
        """Median intensity of the patch border pixels."""
        p = self.patch
        border = np.concatenate([p[0, :], p[-1, :], p[1:-1, 0], p[1:-1, -1]])
        return float(np.median(border))


TrainingRecord = BubbleRecord
