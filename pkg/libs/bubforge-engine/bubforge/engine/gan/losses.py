from typing import Optional, Union

import numpy as np
import torch

from bubforge.engine.errors import ValidationError

SCORE_EPS = 1e-7

Scores = Union[torch.Tensor, np.ndarray, float]


def _scores(s: Scores) -> torch.Tensor:
    t = s if isinstance(s, torch.Tensor) else torch.as_tensor(np.asarray(s, dtype=np.float64))
    return t.clamp(SCORE_EPS, 1.0 - SCORE_EPS)


def discriminator_loss(
    y: Scores, y_hat1: Scores, y_hat2: Scores, y_hat3: Scores, real_term: str = "log"
) -> torch.Tensor:
    """
    Discriminator loss over the real pair and the three false pairs.

    ``L(D) = -1/2 mean(f(y)) - 1/2 mean(1/3 sum_i log(1 - y_hat_i))`` with ``f = log`` or the
    identity (``real_term="linear"``). Scores are clamped to [1e-7, 1 - 1e-7].

    Args:
        y: D(x, k1) on real images with their own features.
        y_hat1: D(x_hat, k2), generated images with their conditioning.
        y_hat2: D(x_hat, k3), generated images with unrelated features.
        y_hat3: D(x, k2), real images with unrelated features.
        real_term: ``"log"`` or ``"linear"``.
    """
    real = _scores(y)
    if real_term == "log":
        real = torch.log(real)
    elif real_term != "linear":
        raise ValidationError(f"unknown real_term {real_term!r}")
    fake = (
        torch.log(1.0 - _scores(y_hat1))
        + torch.log(1.0 - _scores(y_hat2))
        + torch.log(1.0 - _scores(y_hat3))
    ) / 3.0
    return -0.5 * real.mean() - 0.5 * fake.mean()


def generator_loss(
    y_hat1: Scores,
    mode: str = "non-saturating-log",
    y: Optional[Scores] = None,
    y_hat2: Optional[Scores] = None,
    y_hat3: Optional[Scores] = None,
    real_term: str = "log",
) -> torch.Tensor:
    """
    Generator loss on D(x_hat, k2).

    ``non-saturating-log``: ``-mean(log y_hat1)``; ``linear``: ``-1/2 mean(y_hat1)``;
    ``zero-sum``: ``-L(D)``, which needs the other three score vectors as well.
    """
    if mode == "non-saturating-log":
        return -torch.log(_scores(y_hat1)).mean()
    if mode == "linear":
        return -0.5 * _scores(y_hat1).mean()
    if mode == "zero-sum":
        if y is None or y_hat2 is None or y_hat3 is None:
            raise ValidationError("zero-sum generator loss needs y, y_hat2 and y_hat3")
        return -discriminator_loss(y, y_hat1, y_hat2, y_hat3, real_term)
    raise ValidationError(f"unknown generator loss mode {mode!r}")
