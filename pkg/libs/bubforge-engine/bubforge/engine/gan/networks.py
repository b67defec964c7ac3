from typing import List, Optional

import torch
import torch.nn as nn

from bubforge.engine.gan.config import GanConfig

LEAK = 0.2
FEATURE_DIM = 4


class Generator(nn.Module):
    """
    Feature-conditioned generator G(z, k).

    k is embedded (affine 4 -> ne, leaky rectifier) and concatenated with z; an affine
    layer reshapes to ``c0`` maps of side ``s/8``; three (2x nearest upsample, 3x3 conv,
    rectifier) stages output c0, c0/2 and c0/4 channels; a final 3x3 conv and
    ``(tanh + 1) / 2`` give images in [0, 1], laid out (n, channels, s, s).
    """

    def __init__(self, cfg: GanConfig):
        super().__init__()
        self.cfg = cfg
        self.embed = nn.Linear(FEATURE_DIM, cfg.ne)
        self.embed_act = nn.LeakyReLU(LEAK)
        self.project = nn.Linear(cfg.nz + cfg.ne, cfg.grid * cfg.grid * cfg.c0)
        widths = [cfg.c0, cfg.c0, cfg.c0 // 2, cfg.c0 // 4]
        layers: List[nn.Module] = []
        for c_in, c_out in zip(widths[:-1], widths[1:]):
            layers.append(nn.Upsample(scale_factor=2, mode="nearest"))
            layers.append(nn.Conv2d(c_in, c_out, kernel_size=3, padding=1))
            if cfg.batch_norm:
                layers.append(nn.BatchNorm2d(c_out))
            layers.append(nn.ReLU())
        self.stages = nn.Sequential(*layers)
        self.out = nn.Conv2d(widths[-1], cfg.channels, kernel_size=3, padding=1)

    def forward(self, z: torch.Tensor, k: torch.Tensor) -> torch.Tensor:
        e = self.embed_act(self.embed(k))
        h = self.project(torch.cat([z, e], dim=1))
        h = h.view(-1, self.cfg.c0, self.cfg.grid, self.cfg.grid)
        return (torch.tanh(self.out(self.stages(h))) + 1.0) / 2.0


class Discriminator(nn.Module):
    """
    Feature-conditioned discriminator D(x, k) -> score in (0, 1).

    Three stride-2 4x4 convolutions reduce x to side ``s/8``; k is projected to ``nd``
    dimensions, replicated spatially and concatenated in depth, fused by a 1x1 convolution
    and mapped by an affine layer to one logit.
    """

    def __init__(self, cfg: GanConfig):
        super().__init__()
        self.cfg = cfg
        widths = [cfg.channels, *cfg.d_channels]
        layers: List[nn.Module] = []
        for i, (c_in, c_out) in enumerate(zip(widths[:-1], widths[1:])):
            layers.append(nn.Conv2d(c_in, c_out, kernel_size=4, stride=2, padding=1))
            if cfg.batch_norm and i > 0:
                layers.append(nn.BatchNorm2d(c_out))
            layers.append(nn.LeakyReLU(LEAK))
        self.features = nn.Sequential(*layers)
        self.project = nn.Linear(FEATURE_DIM, cfg.nd)
        self.fuse = nn.Conv2d(cfg.d_channels[-1] + cfg.nd, cfg.d_channels[-1], kernel_size=1)
        self.fuse_act = nn.LeakyReLU(LEAK)
        self.head = nn.Linear(cfg.d_channels[-1] * cfg.grid * cfg.grid, 1)

    def logits(self, x: torch.Tensor, k: torch.Tensor) -> torch.Tensor:
        h = self.features(x)
        p = self.project(k)[:, :, None, None].expand(-1, -1, h.shape[2], h.shape[3])
        h = self.fuse_act(self.fuse(torch.cat([h, p], dim=1)))
        return self.head(h.flatten(1)).squeeze(1)

    def forward(self, x: torch.Tensor, k: torch.Tensor) -> torch.Tensor:
        return torch.sigmoid(self.logits(x, k))


def init_weights(module: nn.Module, std: float, generator: Optional[torch.Generator] = None) -> None:
    """Weights ~ N(0, std), biases 0; batch-norm scales 1."""
    for m in module.modules():
        if isinstance(m, (nn.Conv2d, nn.Linear)):
            with torch.no_grad():
                m.weight.normal_(0.0, std, generator=generator)
                if m.bias is not None:
                    m.bias.zero_()
        elif isinstance(m, nn.BatchNorm2d):
            nn.init.ones_(m.weight)
            nn.init.zeros_(m.bias)
