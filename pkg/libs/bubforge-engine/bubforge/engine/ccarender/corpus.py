import logging
import math
from typing import Any, List, Mapping, Optional

import numpy as np
from tqdm import tqdm

from bubforge.engine.ccarender.params import LAST_HARMONIC, FIRST_HARMONIC, CcaParams, CorpusSettings
from bubforge.engine.ccarender.render import FIT_FRACTION, render
from bubforge.engine.config import load_settings
from bubforge.engine.errors import ValidationError
from bubforge.engine.features.feature_vector import HALF_PI, wrap_angle
from bubforge.engine.models.bubble_record import TrainingRecord
from bubforge.engine.patchpipe.normalize import normalize_patch
from bubforge.engine.patchpipe.patch import Patch
from bubforge.engine.patchpipe.settings import PatchSettings

logger = logging.getLogger(__name__)


def load_corpus_settings(overrides: Optional[Mapping[str, Any]] = None) -> CorpusSettings:
    return load_settings(CorpusSettings, "ccarender.json", overrides)


def sample_params(rng: np.random.Generator, settings: CorpusSettings) -> CcaParams:
    """Draws bubble parameters uniformly from the configured ranges."""
    aspect = float(rng.uniform(*settings.aspect_range))
    diameter = float(rng.uniform(*settings.diameter_range))
    phi = wrap_angle(float(rng.uniform(-HALF_PI, HALF_PI)))
    m = float(rng.uniform(*settings.edge_range))
    wobble = tuple(
        (float(rng.uniform(0.0, settings.wobble_max)), float(rng.uniform(0.0, 2.0 * math.pi)))
        for _ in range(FIRST_HARMONIC, LAST_HARMONIC + 1)
    )
    return CcaParams.from_diameter(
        diameter,
        aspect,
        phi=phi,
        m=m,
        wobble=wobble,
        i_bg=settings.i_bg,
        i_edge=settings.i_edge,
        i_in=settings.i_in,
        noise=settings.noise,
    )


def canvas_size(params: CcaParams, margin: int) -> int:
    return int(math.ceil(2.0 * params.extent / FIT_FRACTION)) + 2 * margin


def render_record(
    params: CcaParams,
    rng: np.random.Generator,
    margin: int = 8,
    patch_settings: Optional[PatchSettings] = None,
) -> TrainingRecord:
    """Renders one bubble and normalizes it like a segmented camera patch."""
    size = canvas_size(params, margin)
    jitter = rng.uniform(-0.5, 0.5, size=2)
    img, mask = render(params, size, rng=rng, center=(size / 2.0 + jitter[0], size / 2.0 + jitter[1]))
    return normalize_patch(Patch(image=img, mask=mask, origin=(0, 0)), patch_settings)


def make_corpus(
    n: int,
    seed: int = 0,
    settings: Optional[CorpusSettings] = None,
    patch_settings: Optional[PatchSettings] = None,
    progress: bool = False,
) -> List[TrainingRecord]:
    """
    Rendered single-bubble training records with features extracted from the pixels.

    Record ``i`` depends only on ``(seed, i)``, so corpora are reproducible and a prefix of
    a larger corpus equals the smaller one.

    Raises:
        ValidationError: If ``n < 1`` or a record cannot be normalized after
            ``max_attempts`` draws.
    """
    if n < 1:
        raise ValidationError(f"corpus size must be >= 1, got {n}")
    settings = settings or CorpusSettings()
    records: List[TrainingRecord] = []
    for i in tqdm(range(n), desc="corpus", unit="rec", disable=not progress):
        rng = np.random.default_rng([seed, i])
        last_error: Optional[Exception] = None
        for _ in range(settings.max_attempts):
            try:
                records.append(render_record(sample_params(rng, settings), rng, settings.margin, patch_settings))
                break
            except ValidationError as e:
                last_error = e
        else:
            raise ValidationError(f"corpus record {i} failed {settings.max_attempts} times: {last_error}")
    logger.info("rendered corpus of %d records (seed %d)", n, seed)
    return records
