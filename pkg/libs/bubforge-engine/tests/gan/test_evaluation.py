import math

import pytest

from bubforge.engine.ccarender.corpus import make_corpus
from bubforge.engine.errors import ValidationError
from bubforge.engine.features.feature_vector import FeatureVector
from bubforge.engine.gan import evaluation
from bubforge.engine.gan.config import load_gan_config
from bubforge.engine.gan.evaluation import (
    component_mean,
    component_range,
    evaluate_conditioning,
    evaluate_interpolation,
    evaluate_point,
)
from bubforge.engine.gan.model import GanModel
from bubforge.engine.gan.training import train


def test_off_manifold_request(tiny_model):
    with pytest.raises(ValidationError, match="off-manifold"):
        evaluate_conditioning(tiny_model, "E", sweep=[0.95], samples=2)


def test_unknown_component(tiny_model):
    with pytest.raises(ValidationError, match="unknown feature component"):
        evaluate_conditioning(tiny_model, "area", samples=2)


def test_conditioning_report_shape(tiny_model):
    # ACT
    report = evaluate_conditioning(tiny_model, "m", samples=4, points=3, seed=1)

    # ASSERT
    assert len(report.requested) == len(report.measured) == 3
    assert report.value_range == pytest.approx(0.4)
    assert math.isfinite(report.rmse) and report.rmse >= 0.0
    assert 0 <= report.failures <= 12


def test_single_point_rmse_is_the_bias(tiny_model):
    report = evaluate_conditioning(tiny_model, "m", sweep=[0.4], samples=4, seed=2)

    assert report.rmse == pytest.approx(abs(report.measured[0] - 0.4) / 0.4)


def test_failed_extractions_are_left_out_of_the_mean(tiny_model, monkeypatch):
    # ARRANGE
    lo, hi = component_range(tiny_model.pool, "m")
    extracted = [None, FeatureVector(0.8, 0.0, 0.9, 0.3), FeatureVector(0.8, 0.0, 0.9, 0.5), None]
    monkeypatch.setattr(evaluation, "measure", lambda images: list(extracted))

    # ACT
    report = evaluate_conditioning(tiny_model, "m", sweep=[lo, hi], samples=4)

    # ASSERT
    assert report.measured == pytest.approx([0.4, 0.4]), "mean should cover only the extracted patches"
    assert report.failures == 4, "two failed extractions per sweep value"


def test_sweep_value_without_extractions_measures_midpoint(tiny_model, monkeypatch):
    # ARRANGE
    lo, hi = component_range(tiny_model.pool, "m")
    monkeypatch.setattr(evaluation, "measure", lambda images: [None] * len(images))

    # ACT
    report = evaluate_conditioning(tiny_model, "m", sweep=[lo], samples=3)

    # ASSERT
    assert report.measured == pytest.approx([0.5 * (lo + hi)]), "no extraction falls back to the range midpoint"
    assert report.failures == 3, "every patch failed"
    assert report.to_dict()["failures"] == 3, "failure count should be reported next to the RMSE"


def test_point_report(tiny_model):
    point = evaluate_point(tiny_model, "E", 0.75, samples=4)

    assert point.requested == 0.75
    assert point.relative_error == pytest.approx(abs(point.measured - 0.75) / 0.75)


def test_interpolation_report(tiny_model):
    k_i, k_j = tiny_model.pool_vectors()[:2]

    report = evaluate_interpolation(tiny_model, k_i, k_j, betas=(0.0, 1.0), samples=3)

    assert report.betas == [0.0, 1.0]
    assert len(report.targets) == len(report.measured) == 2


def test_phi_mean_is_circular():
    assert abs(component_mean("phi", [1.5, -1.5])) == pytest.approx(math.pi / 2, abs=1e-9)
    assert component_mean("m", [0.2, 0.4]) == pytest.approx(0.3)


def test_trained_model_follows_conditioning(slow):
    # ARRANGE
    corpus = make_corpus(2000, seed=0)
    cfg = load_gan_config()
    untrained = GanModel.initialize(cfg)
    untrained.set_pool([r.features for r in corpus])

    # ACT
    model = train(corpus, cfg)

    # ASSERT
    thresholds = {"E": 0.10, "m": 0.10, "phi": 0.15, "psi": None}
    for component, limit in thresholds.items():
        trained = evaluate_conditioning(model, component, samples=100, points=10)
        baseline = evaluate_conditioning(untrained, component, samples=100, points=10)
        if limit is not None:
            assert trained.rmse <= limit, f"{component}: RMSE {trained.rmse:.3f}"
        assert trained.rmse < baseline.rmse / 3.0, f"{component}: {trained.rmse:.3f} vs {baseline.rmse:.3f}"

    k_i, k_j = corpus[0].features, corpus[1].features
    report = evaluate_interpolation(model, k_i, k_j)
    assert max(report.max_errors) <= 0.12
