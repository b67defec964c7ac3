from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import torch

from bubforge.engine.errors import ValidationError
from bubforge.engine.features.feature_vector import FeatureVector, as_feature_matrix
from bubforge.engine.gan.config import GanConfig
from bubforge.engine.gan.networks import FEATURE_DIM, Discriminator, Generator, init_weights


@dataclass
class EpochStats:
    epoch: int
    loss_d: float
    loss_g: float
    score_real: float
    score_fake: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "epoch": self.epoch,
            "loss_d": self.loss_d,
            "loss_g": self.loss_g,
            "score_real": self.score_real,
            "score_fake": self.score_fake,
        }


@dataclass(eq=False)
class GanModel:
    """
    Generator and discriminator parameters, their Adam optimizers and the config echo.

    ``pool`` holds the training feature vectors, an (n, 4) array; conditioning requests
    are interpolations of these vectors.
    """

    config: GanConfig
    generator: Generator
    discriminator: Discriminator
    opt_g: torch.optim.Adam
    opt_d: torch.optim.Adam
    pool: np.ndarray = field(default_factory=lambda: np.zeros((0, FEATURE_DIM)))
    history: List[EpochStats] = field(default_factory=lambda: [])

    @classmethod
    def initialize(cls, config: GanConfig) -> "GanModel":
        """Fresh model with N(0, init_std) weights drawn from ``config.seed``."""
        gen = torch.Generator().manual_seed(config.seed)
        generator = Generator(config).to(config.torch_dtype)
        discriminator = Discriminator(config).to(config.torch_dtype)
        init_weights(generator, config.init_std, gen)
        init_weights(discriminator, config.init_std, gen)
        betas = (config.beta1, config.beta2)
        return cls(
            config=config,
            generator=generator,
            discriminator=discriminator,
            opt_g=torch.optim.Adam(generator.parameters(), lr=config.lr, betas=betas),
            opt_d=torch.optim.Adam(discriminator.parameters(), lr=config.lr, betas=betas),
        )

    def architecture(self) -> List[Tuple[str, Tuple[int, ...]]]:
        """Ordered (name, shape) of every parameter tensor, generator first."""
        return [(f"generator.{n}", tuple(p.shape)) for n, p in self.generator.named_parameters()] + [
            (f"discriminator.{n}", tuple(p.shape)) for n, p in self.discriminator.named_parameters()
        ]

    def parameter_count(self) -> int:
        return sum(int(np.prod(shape)) for _, shape in self.architecture())

    def pool_vectors(self) -> List[FeatureVector]:
        return [FeatureVector.from_sequence(row) for row in self.pool]

    def set_pool(self, vectors: List[FeatureVector]) -> None:
        self.pool = as_feature_matrix(vectors)

    def eval(self) -> "GanModel":
        self.generator.eval()
        self.discriminator.eval()
        return self

    def train(self) -> "GanModel":
        self.generator.train()
        self.discriminator.train()
        return self

    def summary(self) -> Dict[str, Any]:
        return {
            "parameters": self.parameter_count(),
            "pool_size": int(self.pool.shape[0]),
            "epochs_trained": len(self.history),
        }


def _check(model: GanModel, k: torch.Tensor, rows: int) -> None:
    if k.ndim != 2 or k.shape != (rows, FEATURE_DIM):
        raise ValidationError(f"features must have shape ({rows}, {FEATURE_DIM}), got {tuple(k.shape)}")


def generator_forward(model: GanModel, z: torch.Tensor, k: torch.Tensor) -> torch.Tensor:
    """
    Images G(z, k), shape (n, channels, side, side), values in [0, 1].

    Raises:
        ValidationError: On shape mismatch.
    """
    cfg = model.config
    if z.ndim != 2 or z.shape[1] != cfg.nz:
        raise ValidationError(f"latent batch must have shape (n, {cfg.nz}), got {tuple(z.shape)}")
    _check(model, k, z.shape[0])
    return model.generator(z.to(cfg.torch_dtype), k.to(cfg.torch_dtype))


def discriminator_forward(model: GanModel, x: torch.Tensor, k: torch.Tensor) -> torch.Tensor:
    """
    Scores D(x, k) in (0, 1), one per image.

    Raises:
        ValidationError: On shape mismatch.
    """
    cfg = model.config
    expected = (cfg.channels, cfg.side, cfg.side)
    if x.ndim != 4 or tuple(x.shape[1:]) != expected:
        raise ValidationError(f"images must have shape (n, {expected}), got {tuple(x.shape)}")
    _check(model, k, x.shape[0])
    return model.discriminator(x.to(cfg.torch_dtype), k.to(cfg.torch_dtype))


def feature_tensor(vectors: List[FeatureVector], dtype: torch.dtype = torch.float32) -> torch.Tensor:
    return torch.as_tensor(as_feature_matrix(vectors), dtype=dtype)


@torch.no_grad()
def generate(
    model: GanModel, vectors: List[FeatureVector], generator: torch.Generator
) -> np.ndarray:
    """Generates one grayscale patch per conditioning vector; returns (n, side, side) floats."""
    if not vectors:
        return np.zeros((0, model.config.side, model.config.side))
    cfg = model.config
    z = torch.randn(len(vectors), cfg.nz, generator=generator, dtype=cfg.torch_dtype)
    model.generator.eval()
    images = generator_forward(model, z, feature_tensor(vectors, cfg.torch_dtype))
    return images.mean(dim=1).to(torch.float64).numpy().clip(0.0, 1.0)
