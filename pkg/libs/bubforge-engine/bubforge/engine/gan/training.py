import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import torch
import torch.nn as nn
from tqdm import tqdm

from bubforge.engine.errors import TrainingDivergedError, ValidationError
from bubforge.engine.features.feature_vector import as_feature_matrix
from bubforge.engine.gan.config import GanConfig
from bubforge.engine.gan.losses import discriminator_loss, generator_loss
from bubforge.engine.gan.model import EpochStats, GanModel, discriminator_forward, generator_forward
from bubforge.engine.imgproc.geometry import resize_bilinear
from bubforge.engine.models.bubble_record import TrainingRecord

logger = logging.getLogger(__name__)

DISCRIMINATOR = "discriminator"
GENERATOR = "generator"


@dataclass
class Batch:
    """Real images x (n, c, s, s), their features k1 and unrelated features k2, k3 (n, 4)."""

    x: torch.Tensor
    k1: torch.Tensor
    k2: torch.Tensor
    k3: torch.Tensor
    z: torch.Tensor


def records_to_tensors(records: Sequence[TrainingRecord], cfg: GanConfig) -> tuple[torch.Tensor, torch.Tensor]:
    """
    Training images resized to the model side with channels replicated, and features.
    """
    images = np.stack(
        [
            r.patch if r.side == cfg.side else resize_bilinear(r.patch, cfg.side, cfg.side)
            for r in records
        ]
    )
    x = torch.as_tensor(images, dtype=cfg.torch_dtype)[:, None].expand(-1, cfg.channels, -1, -1)
    k = torch.as_tensor(as_feature_matrix([r.features for r in records]), dtype=cfg.torch_dtype)
    return x.contiguous(), k


def other_indices(index: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """A uniformly drawn index different from each entry of ``index``."""
    return (index + rng.integers(1, n, size=index.shape)) % n


def make_batch(
    x: torch.Tensor,
    k: torch.Tensor,
    index: np.ndarray,
    rng: np.random.Generator,
    z_source: torch.Generator,
    cfg: GanConfig,
) -> Batch:
    n = k.shape[0]
    idx = torch.as_tensor(index)
    return Batch(
        x=x[idx],
        k1=k[idx],
        k2=k[torch.as_tensor(other_indices(index, n, rng))],
        k3=k[torch.as_tensor(other_indices(index, n, rng))],
        z=torch.randn(len(index), cfg.nz, generator=z_source, dtype=cfg.torch_dtype),
    )


def _scores(model: GanModel, batch: Batch, detach_fake: bool) -> Dict[str, torch.Tensor]:
    fake = generator_forward(model, batch.z, batch.k2)
    if detach_fake:
        fake = fake.detach()
    return {
        "y": discriminator_forward(model, batch.x, batch.k1),
        "y_hat1": discriminator_forward(model, fake, batch.k2),
        "y_hat2": discriminator_forward(model, fake, batch.k3),
        "y_hat3": discriminator_forward(model, batch.x, batch.k2),
    }


def losses(model: GanModel, batch: Batch, target: str) -> tuple[torch.Tensor, Dict[str, torch.Tensor]]:
    """Loss of the ``target`` network on ``batch`` plus the four score vectors."""
    cfg = model.config
    if target == DISCRIMINATOR:
        s = _scores(model, batch, detach_fake=True)
        return discriminator_loss(s["y"], s["y_hat1"], s["y_hat2"], s["y_hat3"], cfg.real_term), s
    if target == GENERATOR:
        s = _scores(model, batch, detach_fake=False)
        loss = generator_loss(
            s["y_hat1"], cfg.generator_loss, s["y"], s["y_hat2"], s["y_hat3"], cfg.real_term
        )
        return loss, s
    raise ValidationError(f"unknown backward target {target!r}")


def gradients(module: nn.Module, loss: torch.Tensor) -> Dict[str, torch.Tensor]:
    """
    Reverse-mode gradients of ``loss`` for every parameter of ``module``.

    Raises:
        TrainingDivergedError: Naming the first parameter with a non-finite gradient.
    """
    named = list(module.named_parameters())
    grads = torch.autograd.grad(loss, [p for _, p in named], allow_unused=True)
    result: Dict[str, torch.Tensor] = {}
    for (name, p), g in zip(named, grads):
        g = torch.zeros_like(p) if g is None else g
        if not torch.isfinite(g).all():
            raise TrainingDivergedError(f"non-finite gradient in layer {name}")
        result[name] = g
    return result


def backward(model: GanModel, batch: Batch, target: str = DISCRIMINATOR) -> Dict[str, torch.Tensor]:
    """
    Gradients of the discriminator loss w.r.t. theta(D), or of the generator loss
    w.r.t. theta(G); the other parameter set is held constant.
    """
    loss, _ = losses(model, batch, target)
    module = model.discriminator if target == DISCRIMINATOR else model.generator
    return gradients(module, loss)


def _apply(module: nn.Module, optimizer: torch.optim.Optimizer, grads: Dict[str, torch.Tensor]) -> None:
    for name, p in module.named_parameters():
        p.grad = grads[name]
    optimizer.step()
    optimizer.zero_grad(set_to_none=True)


def training_step(model: GanModel, batch: Batch) -> Dict[str, float]:
    """One discriminator update followed by one generator update on the same batch."""
    loss_d, scores = losses(model, batch, DISCRIMINATOR)
    if not torch.isfinite(loss_d):
        raise TrainingDivergedError("non-finite discriminator loss")
    _apply(model.discriminator, model.opt_d, gradients(model.discriminator, loss_d))

    loss_g, _ = losses(model, batch, GENERATOR)
    if not torch.isfinite(loss_g):
        raise TrainingDivergedError("non-finite generator loss")
    _apply(model.generator, model.opt_g, gradients(model.generator, loss_g))
    return {
        "loss_d": float(loss_d),
        "loss_g": float(loss_g),
        "score_real": float(scores["y"].mean()),
        "score_fake": float(scores["y_hat1"].mean()),
    }


def train(
    corpus: Sequence[TrainingRecord],
    cfg: GanConfig,
    model: Optional[GanModel] = None,
    progress: bool = False,
    on_epoch: Optional[Callable[[EpochStats], None]] = None,
) -> GanModel:
    """
    Adversarial training on a corpus of single-bubble records.

    Each minibatch pairs real images with their own features (k1) and two unrelated
    training feature vectors (k2, k3); the generator is conditioned on k2. A discriminator
    step precedes each generator step. Given the corpus and config, the result is
    reproducible in single-threaded mode.

    Raises:
        ValidationError: If the corpus holds fewer than two batches.
        TrainingDivergedError: If a loss or gradient becomes non-finite.
    """
    if len(corpus) < 2 * cfg.batch_size:
        raise ValidationError(
            f"corpus of {len(corpus)} records is smaller than two batches of {cfg.batch_size}"
        )
    model = model or GanModel.initialize(cfg)
    model.set_pool([r.features for r in corpus])
    x, k = records_to_tensors(corpus, cfg)
    n = len(corpus)
    rng = np.random.default_rng(cfg.seed)
    z_source = torch.Generator().manual_seed(cfg.seed)
    model.train()

    for epoch in tqdm(range(cfg.epochs), desc="train", unit="epoch", disable=not progress):
        order = rng.permutation(n)
        totals: Dict[str, List[float]] = {}
        for step, start in enumerate(range(0, n - cfg.batch_size + 1, cfg.batch_size)):
            batch = make_batch(x, k, order[start : start + cfg.batch_size], rng, z_source, cfg)
            try:
                stats = training_step(model, batch)
            except TrainingDivergedError as e:
                raise TrainingDivergedError(f"epoch {epoch}, step {step}: {e}", epoch, step) from e
            for key, value in stats.items():
                totals.setdefault(key, []).append(value)
        means = {key: float(np.mean(values)) for key, values in totals.items()}
        if not all(math.isfinite(v) for v in means.values()):
            raise TrainingDivergedError(f"epoch {epoch}: non-finite mean loss", epoch)
        record = EpochStats(epoch=epoch, **means)
        model.history.append(record)
        logger.info(
            "epoch %d: L(D)=%.4f L(G)=%.4f D(x)=%.3f D(G(z))=%.3f",
            epoch,
            record.loss_d,
            record.loss_g,
            record.score_real,
            record.score_fake,
        )
        if on_epoch is not None:
            on_epoch(record)
    model.eval()
    return model
