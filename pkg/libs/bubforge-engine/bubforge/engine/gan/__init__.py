from bubforge.engine.gan.config import GanConfig, load_gan_config, tiny_config
from bubforge.engine.gan.evaluation import (
    ConditioningReport,
    evaluate_conditioning,
    evaluate_interpolation,
    evaluate_point,
)
from bubforge.engine.gan.gradcheck import GradCheckReport, finite_difference_check, grad_check
from bubforge.engine.gan.losses import discriminator_loss, generator_loss
from bubforge.engine.gan.model import (
    EpochStats,
    GanModel,
    discriminator_forward,
    generate,
    generator_forward,
)
from bubforge.engine.gan.model_file import load_model, save_model
from bubforge.engine.gan.training import Batch, backward, train

__all__ = [
    "Batch",
    "ConditioningReport",
    "EpochStats",
    "GanConfig",
    "GanModel",
    "GradCheckReport",
    "backward",
    "discriminator_forward",
    "discriminator_loss",
    "evaluate_conditioning",
    "evaluate_interpolation",
    "evaluate_point",
    "finite_difference_check",
    "generate",
    "generator_forward",
    "generator_loss",
    "grad_check",
    "load_gan_config",
    "load_model",
    "save_model",
    "tiny_config",
    "train",
]
