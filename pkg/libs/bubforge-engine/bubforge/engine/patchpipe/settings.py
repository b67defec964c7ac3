from dataclasses import dataclass
from typing import Any, Mapping, Optional

from bubforge.engine.config import load_settings
from bubforge.engine.errors import ValidationError


@dataclass(frozen=True)
class PatchSettings:
    """Calibration knobs of the patch pipeline (packaged defaults in ``patchpipe.json``)."""

    min_area: int = 30
    padding: int = 4
    background_window: int = 121
    background_offset: float = 0.1
    smoothing_sigma: float = 1.0
    watershed_h_fraction: float = 0.08
    watershed_h_min: float = 1.0
    spur_fraction: float = 0.3
    adaptive_offset: float = 0.05
    min_solidity: float = 0.85
    max_fill: float = 0.9
    record_side: int = 64
    margin_fraction: float = 0.1
    background_target: float = 0.9
    mask_split_gap: float = 0.15

    def __post_init__(self) -> None:
        if self.min_area < 1:
            raise ValidationError("min_area must be >= 1")
        if self.padding < 0:
            raise ValidationError("padding must be >= 0")
        if self.background_window < 3:
            raise ValidationError("background_window must be >= 3")
        if self.record_side < 8:
            raise ValidationError("record_side must be >= 8")
        if not 0.0 < self.max_fill <= 1.0:
            raise ValidationError("max_fill must lie in (0, 1]")
        if not 0.0 <= self.min_solidity <= 1.0:
            raise ValidationError("min_solidity must lie in [0, 1]")


def load_patch_settings(overrides: Optional[Mapping[str, Any]] = None) -> PatchSettings:
    return load_settings(PatchSettings, "patchpipe.json", overrides)
