from dataclasses import dataclass
from typing import Any, Mapping, Optional, Tuple

import torch

from bubforge.engine.config import load_settings
from bubforge.engine.errors import ValidationError

GENERATOR_LOSSES = ("non-saturating-log", "linear", "zero-sum")
REAL_TERMS = ("log", "linear")
DTYPES = {"float32": torch.float32, "float64": torch.float64}


@dataclass(frozen=True)
class GanConfig:
    """
    Architecture and training hyper-parameters of the conditional GAN.

    Defaults are the desk scale (32 px, grayscale); ``side=64, channels=3, nz=100, nd=512``
    is the full-scale configuration.
    """

    side: int = 32
    channels: int = 1
    nz: int = 64
    ne: int = 64
    nd: int = 128
    c0: int = 128
    d_channels: Tuple[int, int, int] = (32, 64, 128)
    batch_size: int = 64
    lr: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999
    epochs: int = 30
    seed: int = 0
    generator_loss: str = "non-saturating-log"
    real_term: str = "log"
    batch_norm: bool = False
    dtype: str = "float32"
    init_std: float = 0.02

    def __post_init__(self) -> None:
        if self.side < 8 or self.side % 8:
            raise ValidationError(f"image side must be a positive multiple of 8, got {self.side}")
        for name in ("channels", "nz", "ne", "nd", "batch_size"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1")
        if self.c0 < 4 or self.c0 % 4:
            raise ValidationError(f"c0 must be a positive multiple of 4, got {self.c0}")
        if len(self.d_channels) != 3 or min(self.d_channels) < 1:
            raise ValidationError("d_channels must hold three positive widths")
        if self.epochs < 0:
            raise ValidationError("epochs must be >= 0")
        if self.generator_loss not in GENERATOR_LOSSES:
            raise ValidationError(f"generator_loss must be one of {GENERATOR_LOSSES}")
        if self.real_term not in REAL_TERMS:
            raise ValidationError(f"real_term must be one of {REAL_TERMS}")
        if self.dtype not in DTYPES:
            raise ValidationError(f"dtype must be one of {tuple(DTYPES)}")

    @property
    def torch_dtype(self) -> torch.dtype:
        return DTYPES[self.dtype]

    @property
    def grid(self) -> int:
        """Side of the coarsest feature map."""
        return self.side // 8


def load_gan_config(overrides: Optional[Mapping[str, Any]] = None) -> GanConfig:
    return load_settings(GanConfig, "gan.json", overrides)


def tiny_config(seed: int = 0) -> GanConfig:
    """64-bit configuration small enough for finite-difference gradient checks."""
    return GanConfig(
        side=8,
        channels=1,
        nz=4,
        ne=4,
        nd=4,
        c0=8,
        d_channels=(2, 4, 8),
        batch_size=3,
        epochs=0,
        seed=seed,
        dtype="float64",
        init_std=0.3,
    )
