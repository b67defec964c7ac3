"""Central finite-difference verification of the reverse-mode gradients."""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np
import torch
import torch.nn as nn

from bubforge.engine.gan.config import GanConfig, tiny_config
from bubforge.engine.gan.model import GanModel
from bubforge.engine.gan.training import DISCRIMINATOR, GENERATOR, Batch, gradients, losses

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-5
ERROR_FLOOR = 1e-6
_KINKED = (nn.ReLU, nn.LeakyReLU)


@dataclass
class GradCheckReport:
    max_rel_error: float
    parameters: int
    skipped: int
    per_network: Dict[str, float]

    def to_dict(self) -> Dict[str, object]:
        return {
            "max_rel_error": self.max_rel_error,
            "parameters": self.parameters,
            "skipped": self.skipped,
            "per_network": self.per_network,
        }


def relative_error(analytic: float, numeric: float, floor: float = ERROR_FLOOR) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


class _SignRecorder:
    """Records which side of the kink every rectifier input falls on."""

    def __init__(self, modules: List[nn.Module]) -> None:
        self.patterns: List[torch.Tensor] = []
        self._handles = [
            m.register_forward_hook(lambda _m, inputs, _out: self.patterns.append(inputs[0] > 0))
            for m in modules
            if isinstance(m, _KINKED)
        ]

    def take(self) -> List[torch.Tensor]:
        taken, self.patterns = self.patterns, []
        return taken

    def close(self) -> None:
        for h in self._handles:
            h.remove()


def finite_difference_check(
    module: nn.Module,
    loss_fn: Callable[[], torch.Tensor],
    step: float = DEFAULT_STEP,
    watch: Optional[List[nn.Module]] = None,
) -> tuple[float, int, int]:
    """
    Compares autograd gradients of ``loss_fn`` w.r.t. ``module``'s parameters with central
    differences, one parameter element at a time.

    Perturbations that move any rectifier input across zero are retried with a tenfold
    smaller step; if still crossing, that element is skipped.

    Args:
        module: Parameters to check.
        loss_fn: Recomputes the scalar loss from the current parameters.
        step: Finite-difference step.
        watch: Modules whose rectifiers are monitored; ``module`` when omitted.

    Returns:
        tuple: (max relative error, elements checked, elements skipped).
    """
    analytic = gradients(module, loss_fn())
    recorder = _SignRecorder([sub for w in (watch or [module]) for sub in w.modules()])
    worst, checked, skipped = 0.0, 0, 0
    try:
        with torch.no_grad():
            loss_fn()
            baseline = recorder.take()
            for name, p in module.named_parameters():
                flat = p.data.view(-1)
                grad = analytic[name].reshape(-1)
                for i in range(flat.numel()):
                    original = float(flat[i])
                    numeric = None
                    h = step
                    for _ in range(3):
                        flat[i] = original + h
                        plus = float(loss_fn())
                        plus_signs = recorder.take()
                        flat[i] = original - h
                        minus = float(loss_fn())
                        minus_signs = recorder.take()
                        flat[i] = original
                        if all(torch.equal(a, b) for a, b in zip(baseline, plus_signs)) and all(
                            torch.equal(a, b) for a, b in zip(baseline, minus_signs)
                        ):
                            numeric = (plus - minus) / (2.0 * h)
                            break
                        h /= 10.0
                    if numeric is None:
                        skipped += 1
                        continue
                    checked += 1
                    worst = max(worst, relative_error(float(grad[i]), numeric))
    finally:
        recorder.close()
    return worst, checked, skipped


def random_batch(cfg: GanConfig, n: int, rng: np.random.Generator) -> Batch:
    def features() -> torch.Tensor:
        k = np.column_stack(
            [
                rng.uniform(0.4, 1.0, n),
                rng.uniform(-np.pi / 2, np.pi / 2, n),
                rng.uniform(0.6, 1.0, n),
                rng.uniform(0.05, 0.9, n),
            ]
        )
        return torch.as_tensor(k, dtype=cfg.torch_dtype)

    return Batch(
        x=torch.as_tensor(rng.uniform(0.0, 1.0, (n, cfg.channels, cfg.side, cfg.side)), dtype=cfg.torch_dtype),
        k1=features(),
        k2=features(),
        k3=features(),
        z=torch.as_tensor(rng.standard_normal((n, cfg.nz)), dtype=cfg.torch_dtype),
    )


def grad_check(seed: int = 0, step: float = DEFAULT_STEP, cfg: Optional[GanConfig] = None) -> GradCheckReport:
    """
    Maximum relative error between reverse-mode and central-difference gradients of both
    losses, over every parameter of both networks, on the 64-bit tiny configuration.
    """
    cfg = cfg or tiny_config(seed)
    model = GanModel.initialize(cfg)
    batch = random_batch(cfg, cfg.batch_size, np.random.default_rng(seed))
    both = [model.generator, model.discriminator]
    per_network: Dict[str, float] = {}
    total, skipped_total = 0, 0
    for target, module in ((DISCRIMINATOR, model.discriminator), (GENERATOR, model.generator)):
        worst, checked, skipped = finite_difference_check(
            module, lambda: losses(model, batch, target)[0], step, watch=both
        )
        per_network[target] = worst
        total += checked
        skipped_total += skipped
    report = GradCheckReport(
        max_rel_error=max(per_network.values()),
        parameters=total,
        skipped=skipped_total,
        per_network=per_network,
    )
    logger.info("gradient check: max relative error %.3e over %d parameters", report.max_rel_error, total)
    return report
