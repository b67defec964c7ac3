import numpy as np
import pytest
import torch
import torch.nn as nn

from bubforge.engine.errors import ValidationError
from bubforge.engine.gan.config import GanConfig, load_gan_config, tiny_config
from bubforge.engine.gan.model import GanModel, discriminator_forward, generate, generator_forward


def test_generated_patches_shape_and_range(tiny_model):
    # ACT
    images = generate(tiny_model, tiny_model.pool_vectors(), torch.Generator().manual_seed(0))

    # ASSERT
    assert images.shape == (3, 8, 8)
    assert images.min() >= 0.0 and images.max() <= 1.0


def test_generation_is_seeded(tiny_model):
    vectors = tiny_model.pool_vectors()

    a = generate(tiny_model, vectors, torch.Generator().manual_seed(4))
    b = generate(tiny_model, vectors, torch.Generator().manual_seed(4))

    np.testing.assert_array_equal(a, b)


def test_discriminator_scores_are_probabilities(tiny_model):
    x = torch.rand(5, 1, 8, 8, dtype=torch.float64)
    k = torch.as_tensor(np.tile(tiny_model.pool[:1], (5, 1)))

    scores = discriminator_forward(tiny_model, x, k)

    assert scores.shape == (5,)
    assert bool(((scores > 0) & (scores < 1)).all())


def test_batch_and_singleton_forward_agree(tiny_model):
    # ARRANGE
    gen = torch.Generator().manual_seed(2)
    z = torch.randn(3, 4, generator=gen, dtype=torch.float64)
    k = torch.as_tensor(tiny_model.pool)

    # ACT
    batch = generator_forward(tiny_model, z, k)
    single = torch.cat([generator_forward(tiny_model, z[i : i + 1], k[i : i + 1]) for i in range(3)])

    # ASSERT
    torch.testing.assert_close(batch, single)
    torch.testing.assert_close(
        discriminator_forward(tiny_model, batch, k),
        torch.cat([discriminator_forward(tiny_model, batch[i : i + 1], k[i : i + 1]) for i in range(3)]),
    )


def test_forward_shape_mismatch(tiny_model):
    with pytest.raises(ValidationError, match="latent batch"):
        generator_forward(tiny_model, torch.zeros(2, 7), torch.zeros(2, 4))
    with pytest.raises(ValidationError, match="features must have shape"):
        generator_forward(tiny_model, torch.zeros(2, 4), torch.zeros(3, 4))
    with pytest.raises(ValidationError, match="images must have shape"):
        discriminator_forward(tiny_model, torch.zeros(2, 1, 16, 16), torch.zeros(2, 4))


def test_initialization_is_seeded():
    a = GanModel.initialize(tiny_config(5))
    b = GanModel.initialize(tiny_config(5))

    for p, q in zip(a.generator.parameters(), b.generator.parameters()):
        assert torch.equal(p, q)


def test_architecture_lists_both_networks(tiny_model):
    names = [name for name, _ in tiny_model.architecture()]

    assert names[0].startswith("generator.")
    assert names[-1].startswith("discriminator.")
    assert tiny_model.parameter_count() == sum(p.numel() for p in tiny_model.generator.parameters()) + sum(
        p.numel() for p in tiny_model.discriminator.parameters()
    )


def test_generator_upsamples_with_nearest_then_conv(tiny_model):
    # ARRANGE
    stages = list(tiny_model.generator.stages)

    # ACT
    upsamples = [m for m in stages if isinstance(m, nn.Upsample)]
    following = [stages[i + 1] for i, m in enumerate(stages) if isinstance(m, nn.Upsample)]

    # ASSERT
    assert not any(isinstance(m, nn.ConvTranspose2d) for m in tiny_model.generator.modules()), "no transposed convs"
    assert [(m.mode, m.scale_factor) for m in upsamples] == [("nearest", 2)] * 3, "three 2x nearest upsamples"
    assert all(isinstance(m, nn.Conv2d) and m.kernel_size == (3, 3) for m in following), "each followed by a 3x3 conv"


def test_packaged_config_loads():
    cfg = load_gan_config({"epochs": 3})

    assert cfg.epochs == 3
    assert cfg.side % 8 == 0


@pytest.mark.parametrize(
    "kwargs, match",
    [
        ({"side": 12}, "multiple of 8"),
        ({"c0": 6}, "c0"),
        ({"generator_loss": "wasserstein"}, "generator_loss"),
        ({"dtype": "float16"}, "dtype"),
    ],
)
def test_config_validation(kwargs, match):
    with pytest.raises(ValidationError, match=match):
        GanConfig(**kwargs)


def zero_parameters(module):
    with torch.no_grad():
        for p in module.parameters():
            p.zero_()


def test_zero_generator_outputs_half(tiny_model):
    # ARRANGE
    zero_parameters(tiny_model.generator)
    z = torch.randn(2, 4, generator=torch.Generator().manual_seed(0), dtype=torch.float64)
    k = torch.as_tensor(tiny_model.pool[:2])

    # ACT
    images = generator_forward(tiny_model, z, k)

    # ASSERT
    assert bool((images == 0.5).all()), "squash of a zero pre-activation is 0.5"


def test_zero_discriminator_scores_half(tiny_model):
    # ARRANGE
    zero_parameters(tiny_model.discriminator)
    x = torch.rand(3, 1, 8, 8, dtype=torch.float64)

    # ACT
    scores = discriminator_forward(tiny_model, x, torch.as_tensor(tiny_model.pool))

    # ASSERT
    assert scores.tolist() == [0.5, 0.5, 0.5], "logistic of a zero logit is exactly 0.5"


def test_discriminator_score_depends_on_features(tiny_model):
    # ARRANGE
    x = torch.rand(1, 1, 8, 8, generator=torch.Generator().manual_seed(3), dtype=torch.float64).expand(2, -1, -1, -1)
    k = torch.as_tensor(tiny_model.pool[:2])

    # ACT
    scores = discriminator_forward(tiny_model, x, k)

    # ASSERT
    assert float(scores[0]) != float(scores[1]), "same image, different features, different score"
