import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np

from bubforge.engine.assembler.bubble_list import BubbleInstance, place_with_boundary, sample_bubble_list
from bubforge.engine.assembler.flow_spec import FlowSpec
from bubforge.engine.assembler.labels import BubbleLabel, LabelSet
from bubforge.engine.assembler.painter import Stamp, apply_stamp, make_stamp
from bubforge.engine.assembler.sources import AbstractBubbleSource
from bubforge.engine.errors import ValidationError
from bubforge.engine.features.descriptors import extract_features
from bubforge.engine.features.feature_vector import FeatureVector
from bubforge.engine.imgproc.arrays import BitMask, Raster
from bubforge.engine.patchpipe.normalize import largest_component

logger = logging.getLogger(__name__)

PROFILE_BINS = 10


@dataclass
class Scene:
    """
    A synthesized image with its labels.

    ``foreground`` marks every pixel a bubble was painted on. ``void_fraction`` is the
    projected gas fraction of the channel area inside the image and ``void_profile`` the
    same fraction over equal-width lateral bins.
    """

    image: Raster
    labels: LabelSet
    foreground: BitMask
    void_fraction: float
    void_profile: List[float]


def painted_features(stamp: Stamp, fallback: FeatureVector) -> FeatureVector:
    """Features of the resized record; the record's own vector when extraction fails."""
    mask = largest_component(stamp.mask)
    if not mask.any():
        return fallback
    try:
        return extract_features(stamp.patch, mask)
    except ValidationError:
        return fallback


def _label(i: int, inst: BubbleInstance, k: FeatureVector, spec: FlowSpec) -> BubbleLabel:
    x0, y0, x1, y1 = inst.bbox()
    return BubbleLabel(
        id=i,
        x=inst.x,
        y=inst.y,
        z=inst.z,
        a=inst.a,
        b=inst.b,
        phi=k.phi,
        aspect_ratio=k.e,
        circularity=k.psi,
        edge_ratio=k.m,
        area=float(np.pi * inst.a * inst.b),
        clipped=inst.clipped,
        bbox=(max(0.0, x0), max(0.0, y0), min(float(spec.width), x1), min(float(spec.height), y1)),
        record=inst.record,
    )


def channel_columns(spec: FlowSpec) -> Tuple[int, int]:
    """First and one-past-last image column lying fully inside the channel."""
    return int(np.ceil(spec.left_px - 1e-9)), int(np.floor(spec.right_px + 1e-9))


def void_statistics(foreground: BitMask, spec: FlowSpec, bins: int = PROFILE_BINS) -> Tuple[float, List[float]]:
    c0, c1 = channel_columns(spec)
    inside = foreground[:, c0:c1]
    if inside.size == 0:
        return 0.0, [0.0] * bins
    profile = [float(part.mean()) if part.size else 0.0 for part in np.array_split(inside, bins, axis=1)]
    return float(inside.mean()), profile


def synthesize(
    spec: FlowSpec,
    source: AbstractBubbleSource,
    bubbles: Optional[List[BubbleInstance]] = None,
) -> Scene:
    """
    Renders one labeled scene.

    The canvas is the background plus Gaussian noise. Bubbles are sampled from the spec
    (unless ``bubbles`` is given), placed against the walls and image edges, matched to a
    record of ``source`` and painted in ascending z. Everything random derives from
    ``spec.seed``.
    """
    rng = np.random.default_rng(spec.seed)
    if bubbles is None:
        bubbles = sample_bubble_list(spec, rng, source.feature_pool())
    shape = (spec.height, spec.width)
    image = np.clip(spec.background + rng.normal(0.0, spec.noise, size=shape), 0.0, 1.0)
    foreground = np.zeros(shape, dtype=bool)
    walls = (spec.left_px, spec.right_px)

    placed = sorted((place_with_boundary(b, spec) for b in bubbles), key=lambda b: b.z)
    labels: List[BubbleLabel] = []
    for i, inst in enumerate(placed):
        record, index = source.record_for(inst)
        stamp = make_stamp(record, inst, shape, spec.background, walls)
        inst = replace(inst, record=index, scale=stamp.scale)
        apply_stamp(image, stamp)
        foreground[stamp.window] |= stamp.participates
        labels.append(_label(i, inst, painted_features(stamp, record.features), spec))

    void_fraction, void_profile = void_statistics(foreground, spec)
    logger.info(
        "scene seed %d: %d bubbles (%d clipped), void fraction %.4f",
        spec.seed,
        len(labels),
        sum(label.clipped for label in labels),
        void_fraction,
    )
    return Scene(
        image=image,
        labels=LabelSet(labels=labels, spec=spec, seed=spec.seed, extra={"renderer": source.name}),
        foreground=foreground,
        void_fraction=void_fraction,
        void_profile=void_profile,
    )
