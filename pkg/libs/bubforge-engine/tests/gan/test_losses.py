import math

import pytest
import torch

from bubforge.engine.errors import ValidationError
from bubforge.engine.gan.losses import discriminator_loss, generator_loss


def test_discriminator_loss_at_chance():
    loss = discriminator_loss(0.5, 0.5, 0.5, 0.5)

    assert float(loss) == pytest.approx(math.log(2.0), abs=1e-9)


def test_discriminator_loss_linear_real_term():
    loss = discriminator_loss(0.5, 0.5, 0.5, 0.5, real_term="linear")

    assert float(loss) == pytest.approx(-0.25 + 0.5 * math.log(2.0), abs=1e-9)


def test_perfect_discriminator_has_vanishing_loss():
    loss = discriminator_loss(1.0, 0.0, 0.0, 0.0)

    assert float(loss) == pytest.approx(0.0, abs=1e-6)


@pytest.mark.parametrize(
    "mode, expected",
    [
        ("non-saturating-log", math.log(2.0)),
        ("linear", -0.25),
    ],
)
def test_generator_loss_at_chance(mode, expected):
    assert float(generator_loss(torch.full((4,), 0.5, dtype=torch.float64), mode)) == pytest.approx(expected)


def test_zero_sum_losses_cancel():
    # ARRANGE
    gen = torch.Generator().manual_seed(3)
    y, y1, y2, y3 = (torch.rand(16, generator=gen, dtype=torch.float64) for _ in range(4))

    # ACT
    loss_d = discriminator_loss(y, y1, y2, y3)
    loss_g = generator_loss(y1, "zero-sum", y, y2, y3)

    # ASSERT
    assert float(loss_g) == -float(loss_d)


def test_zero_sum_needs_all_scores():
    with pytest.raises(ValidationError, match="zero-sum"):
        generator_loss(0.5, "zero-sum")


def test_unknown_modes_are_rejected():
    with pytest.raises(ValidationError, match="generator loss mode"):
        generator_loss(0.5, "hinge")
    with pytest.raises(ValidationError, match="real_term"):
        discriminator_loss(0.5, 0.5, 0.5, 0.5, real_term="square")
