"""Conditioning fidelity: generate on requested features, extract, compare."""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import torch

from bubforge.engine.errors import ValidationError
from bubforge.engine.features.descriptors import extract_features
from bubforge.engine.features.feature_vector import (
    FEATURE_INDEX,
    FEATURE_NAMES,
    HALF_PI,
    FeatureVector,
    wrap_angle,
)
from bubforge.engine.features.interpolation import interpolate
from bubforge.engine.gan.model import GanModel, generate
from bubforge.engine.patchpipe.normalize import derive_mask

logger = logging.getLogger(__name__)

DEFAULT_POINTS = 10
DEFAULT_SAMPLES = 100
DEFAULT_BETAS = (0.0, 0.3, 0.5, 0.7, 1.0)


@dataclass
class ConditioningReport:
    component: str
    requested: List[float]
    measured: List[float]
    rmse: float
    value_range: float
    failures: int = 0

    def to_dict(self) -> Dict[str, object]:
        return {
            "component": self.component,
            "requested": self.requested,
            "measured": self.measured,
            "rmse": self.rmse,
            "range": self.value_range,
            "failures": self.failures,
        }


@dataclass
class PointReport:
    component: str
    requested: float
    measured: float
    relative_error: float
    failures: int = 0


@dataclass
class InterpolationReport:
    betas: List[float]
    targets: List[List[float]]
    measured: List[List[float]]
    max_errors: List[float] = field(default_factory=lambda: [])


def component_range(pool: np.ndarray, component: str) -> tuple[float, float]:
    """Observed range of one component; phi always spans its full period."""
    if component == "phi":
        return -HALF_PI, HALF_PI
    column = pool[:, FEATURE_INDEX[component]]
    return float(column.min()), float(column.max())


def component_error(component: str, measured: float, requested: float) -> float:
    if component == "phi":
        return wrap_angle(measured - requested)
    return measured - requested


def component_mean(component: str, values: Sequence[float]) -> float:
    """Arithmetic mean, or the period-pi circular mean for phi."""
    arr = np.asarray(values, dtype=np.float64)
    if component == "phi":
        return wrap_angle(0.5 * math.atan2(float(np.sin(2 * arr).mean()), float(np.cos(2 * arr).mean())))
    return float(arr.mean())


def _check_component(component: str) -> None:
    if component not in FEATURE_INDEX:
        raise ValidationError(f"unknown feature component {component!r}, expected one of {FEATURE_NAMES}")


def _pool(model: GanModel, pool: Optional[Sequence[FeatureVector]]) -> List[FeatureVector]:
    vectors = list(pool) if pool is not None else model.pool_vectors()
    if len(vectors) < 2:
        raise ValidationError("conditioning pool needs at least two feature vectors")
    return vectors


def conditioning_vectors(
    pool: Sequence[FeatureVector], n: int, rng: np.random.Generator
) -> List[FeatureVector]:
    """``n`` interpolations of random pool pairs with beta ~ U[0, 1]."""
    i = rng.integers(0, len(pool), size=n)
    j = rng.integers(0, len(pool), size=n)
    beta = rng.uniform(0.0, 1.0, size=n)
    return [interpolate(pool[a], pool[b], float(t)) for a, b, t in zip(i, j, beta)]


def measure(images: np.ndarray) -> List[Optional[FeatureVector]]:
    """Extracted features of generated patches; None where no single bubble is found."""
    out: List[Optional[FeatureVector]] = []
    for img in images:
        mask = derive_mask(img)
        try:
            out.append(extract_features(img, mask) if mask.any() else None)
        except ValidationError:
            out.append(None)
    return out


def _measured_component(
    model: GanModel,
    vectors: List[FeatureVector],
    component: str,
    fallback: float,
    z_source: torch.Generator,
) -> tuple[float, int]:
    extracted = measure(generate(model, vectors, z_source))
    values = [k.to_list()[FEATURE_INDEX[component]] for k in extracted if k is not None]
    failed = len(extracted) - len(values)
    if not values:
        logger.warning("no extractable bubble in %d patches, using %s=%.4f", failed, component, fallback)
        return fallback, failed
    return component_mean(component, values), failed


def evaluate_conditioning(
    model: GanModel,
    component: str,
    sweep: Optional[Sequence[float]] = None,
    samples: int = DEFAULT_SAMPLES,
    pool: Optional[Sequence[FeatureVector]] = None,
    seed: int = 0,
    points: int = DEFAULT_POINTS,
) -> ConditioningReport:
    """
    Sweeps one component through requested values and measures what the generator delivers.

    For each sweep value, ``samples`` conditioning vectors are interpolations of pool pairs
    with the swept component overridden; the generated patches go through the feature
    extractor and the component is averaged. The RMSE between requested and measured means
    is normalized by the component's pool range. Patches without an extractable bubble are
    left out of the mean and counted in ``failures``; a sweep value with no extractable
    patch at all measures as the range midpoint.

    Args:
        model: Trained model.
        component: ``E``, ``phi``, ``psi`` or ``m``.
        sweep: Requested values; ``points`` values evenly spread inside the pool range
            when omitted.
        samples: Generated patches per sweep value.
        pool: Feature vectors defining the manifold; the model's training pool by default.
        seed: Seed of the conditioning draws and latent vectors.
        points: Sweep length when ``sweep`` is omitted.

    Raises:
        ValidationError: If a sweep value lies outside the pool range ("off-manifold request").
    """
    _check_component(component)
    vectors = _pool(model, pool)
    pool_array = np.array([v.to_list() for v in vectors])
    lo, hi = component_range(pool_array, component)
    span = hi - lo if component != "phi" else math.pi
    if sweep is None:
        sweep = list(np.linspace(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), points))
    for v in sweep:
        if not lo <= v <= hi:
            raise ValidationError(f"off-manifold request: {component}={v} outside [{lo:.4f}, {hi:.4f}]")
    if span <= 0:
        raise ValidationError(f"pool has no spread in {component}")

    rng = np.random.default_rng(seed)
    z_source = torch.Generator().manual_seed(seed)
    midpoint = 0.0 if component == "phi" else 0.5 * (lo + hi)
    measured: List[float] = []
    failures = 0
    for v in sweep:
        requests = [k.replace(component, float(v)) for k in conditioning_vectors(vectors, samples, rng)]
        mean, failed = _measured_component(model, requests, component, midpoint, z_source)
        measured.append(mean)
        failures += failed
    errors = np.array([component_error(component, m, float(v)) for m, v in zip(measured, sweep)])
    rmse = float(np.sqrt(np.mean(errors**2)) / span)
    logger.info("conditioning %s: normalized RMSE %.4f (%d failed extractions)", component, rmse, failures)
    return ConditioningReport(
        component=component,
        requested=[float(v) for v in sweep],
        measured=measured,
        rmse=rmse,
        value_range=span,
        failures=failures,
    )


def evaluate_point(
    model: GanModel,
    component: str,
    value: float,
    samples: int = 64,
    pool: Optional[Sequence[FeatureVector]] = None,
    seed: int = 0,
) -> PointReport:
    """Mean generated value and relative error for one fixed conditioning value."""
    report = evaluate_conditioning(model, component, [value], samples, pool, seed)
    measured = report.measured[0]
    error = abs(component_error(component, measured, value)) / max(abs(value), 1e-12)
    return PointReport(component, value, measured, error, report.failures)


def evaluate_interpolation(
    model: GanModel,
    k_i: FeatureVector,
    k_j: FeatureVector,
    betas: Sequence[float] = DEFAULT_BETAS,
    samples: int = 32,
    seed: int = 0,
    pool: Optional[Sequence[FeatureVector]] = None,
) -> InterpolationReport:
    """
    Generates bubbles along the interpolation from ``k_j`` (beta 0) to ``k_i`` (beta 1) and
    compares range-normalized targets with the normalized mean extracted features.
    """
    vectors = _pool(model, pool)
    pool_array = np.array([v.to_list() for v in vectors])
    spans = []
    for name in FEATURE_NAMES:
        lo, hi = component_range(pool_array, name)
        spans.append((lo, max(hi - lo, 1e-12) if name != "phi" else math.pi))
    z_source = torch.Generator().manual_seed(seed)

    report = InterpolationReport(betas=[float(b) for b in betas], targets=[], measured=[])
    for beta in betas:
        target = interpolate(k_i, k_j, float(beta))
        extracted = [k for k in measure(generate(model, [target] * samples, z_source)) if k is not None]
        if not extracted:
            means = [float("nan")] * 4
        else:
            means = [component_mean(name, [k.to_list()[i] for k in extracted]) for i, name in enumerate(FEATURE_NAMES)]
        errors = []
        norm_target, norm_measured = [], []
        for i, name in enumerate(FEATURE_NAMES):
            lo, span = spans[i]
            t = target.to_list()[i]
            norm_target.append((t - lo) / span if name != "phi" else t / span)
            norm_measured.append((means[i] - lo) / span if name != "phi" else means[i] / span)
            errors.append(abs(component_error(name, means[i], t)) / span)
        report.targets.append(norm_target)
        report.measured.append(norm_measured)
        report.max_errors.append(float(max(errors)))
    return report
