import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import torch
from tqdm import tqdm

from bubforge.engine.bubdb.kdtree import FeatureKDTree, linear_scan
from bubforge.engine.errors import GenerationError, ValidationError
from bubforge.engine.features.descriptors import extract_features
from bubforge.engine.features.feature_vector import HALF_PI, FeatureVector, as_feature_matrix
from bubforge.engine.features.interpolation import DEFAULT_WEIGHTS, interpolate
from bubforge.engine.gan.model import GanModel, generate
from bubforge.engine.imgproc.arrays import Raster
from bubforge.engine.imgproc.codecs import quantize
from bubforge.engine.imgproc.morphology import connected_components
from bubforge.engine.models.bubble_record import BubbleRecord
from bubforge.engine.patchpipe.normalize import derive_mask
from bubforge.engine.patchpipe.settings import PatchSettings

logger = logging.getLogger(__name__)

DEFAULT_COUNT = 10_000
ATTEMPTS_PER_RECORD = 10
DEFAULT_BATCH = 256

_PHI_MAX = float(np.nextafter(np.float32(HALF_PI), np.float32(0.0)))
_PHI_MIN = float(np.nextafter(np.float32(-HALF_PI), np.float32(0.0)))


def quantize_features(k: FeatureVector) -> FeatureVector:
    """Rounds a vector to its stored float32 form, keeping phi inside (-pi/2, pi/2]."""
    e, phi, psi, m = (float(v) for v in np.asarray(k.to_list(), dtype=np.float32))
    phi = min(max(phi, _PHI_MIN), _PHI_MAX)
    return FeatureVector(e=e, phi=phi, psi=psi, m=m)


def quantize_patch(img: Raster) -> Raster:
    """Intensities as stored: multiples of 1/255."""
    return quantize(img).astype(np.float64) / 255.0


def quantize_record(record: BubbleRecord) -> BubbleRecord:
    return BubbleRecord(
        patch=quantize_patch(record.patch),
        mask=record.mask.astype(bool),
        features=quantize_features(record.features),
    )


@dataclass(eq=False)
class BubbleDb:
    """
    Immutable store of single-bubble records with an exact feature index.

    Attributes:
        records: The bubble records, all ``side`` x ``side``.
        side: Patch side in pixels.
        channels: Stored image channels.
        is_corpus: True for training corpora, false for generated databases.
        seed: Seed the records were produced with.
        config_hash: Hash of the configuration that produced the records.
    """

    records: List[BubbleRecord]
    side: int
    channels: int = 1
    is_corpus: bool = False
    seed: int = 0
    config_hash: str = ""
    features: np.ndarray = field(init=False, repr=False)
    index: FeatureKDTree = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.side < 1:
            raise ValidationError(f"patch side must be positive, got {self.side}")
        if self.channels != 1:
            raise ValidationError(f"only single-channel records are supported, got {self.channels}")
        for i, r in enumerate(self.records):
            if r.side != self.side:
                raise ValidationError(f"record {i} has side {r.side}, database side is {self.side}")
        self.features = as_feature_matrix([r.features for r in self.records])
        self.index = FeatureKDTree(self.features)

    @classmethod
    def from_records(
        cls,
        records: Sequence[BubbleRecord],
        is_corpus: bool = False,
        seed: int = 0,
        config_hash: str = "",
    ) -> "BubbleDb":
        """Database of ``records`` in their stored (quantized) form."""
        if not records:
            raise ValidationError("cannot infer the patch side of an empty record list")
        return cls(
            records=[quantize_record(r) for r in records],
            side=records[0].side,
            is_corpus=is_corpus,
            seed=seed,
            config_hash=config_hash,
        )

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, i: int) -> BubbleRecord:
        return self.records[i]

    def feature_vectors(self) -> List[FeatureVector]:
        return [r.features for r in self.records]


def _single_bubble(img: Raster, settings: PatchSettings) -> Optional[BubbleRecord]:
    patch = quantize_patch(img)
    mask = derive_mask(patch, settings.mask_split_gap, keep_largest=False)
    labels, n = connected_components(mask, connectivity=8)
    if n == 0:
        return None
    areas = np.bincount(labels.ravel())[1:]
    if np.count_nonzero(areas >= settings.min_area) > 1:
        return None
    main = labels == int(np.argmax(areas)) + 1
    try:
        features = extract_features(patch, main)
    except ValidationError:
        return None
    return BubbleRecord(patch=patch, mask=main, features=quantize_features(features))


def build(
    model: GanModel,
    n: int = DEFAULT_COUNT,
    pool: Optional[Sequence[FeatureVector]] = None,
    seed: int = 0,
    settings: Optional[PatchSettings] = None,
    batch: int = DEFAULT_BATCH,
    progress: bool = False,
) -> BubbleDb:
    """
    Generates a bubble database.

    Each candidate is conditioned on ``beta * k_i + (1 - beta) * k_j`` for a random pool
    pair and ``beta ~ U[0, 1]``. Features are re-extracted from the generated patch; patches
    whose mask splits into several bubbles or fails extraction are regenerated.

    Args:
        model: Trained generator.
        n: Number of records.
        pool: Conditioning pool; defaults to the pool stored with the model.
        seed: Seed of the pair, beta and latent draws.
        settings: Mask derivation settings.
        batch: Generator batch size.
        progress: Show a progress bar.

    Raises:
        ValidationError: If ``n < 1`` or the pool is empty.
        GenerationError: If more than ``10 n`` candidates are needed.
    """
    if n < 1:
        raise ValidationError(f"database size must be at least 1, got {n}")
    vectors = list(pool) if pool is not None else model.pool_vectors()
    if not vectors:
        raise ValidationError("conditioning pool is empty")
    settings = settings or PatchSettings()
    rng = np.random.default_rng(seed)
    latent = torch.Generator().manual_seed(seed)
    cap = ATTEMPTS_PER_RECORD * n
    records: List[BubbleRecord] = []
    attempts = 0

    with tqdm(total=n, disable=not progress, desc="gendb", unit="bubble") as bar:
        while len(records) < n:
            if attempts >= cap:
                raise GenerationError(
                    f"generator yields unusable patches: {len(records)} of {attempts} "
                    f"candidates accepted ({len(records) / attempts:.1%}), {n} needed",
                    attempts=attempts,
                    accepted=len(records),
                )
            size = min(batch, cap - attempts)
            pairs = rng.integers(len(vectors), size=(size, 2))
            betas = rng.uniform(0.0, 1.0, size=size)
            targets = [interpolate(vectors[i], vectors[j], float(b)) for (i, j), b in zip(pairs, betas)]
            images = generate(model, targets, latent)
            attempts += size
            for img in images:
                if len(records) == n:
                    break
                record = _single_bubble(img, settings)
                if record is not None:
                    records.append(record)
                    bar.update(1)

    logger.info("Generated %d bubbles from %d candidates (yield %.1f%%)", n, attempts, 100.0 * n / attempts)
    return BubbleDb(records=records, side=model.config.side, seed=seed)


def query_nearest(
    db: BubbleDb, target: FeatureVector, weights: Sequence[float] = DEFAULT_WEIGHTS
) -> int:
    """
    Index of the record nearest to ``target`` under the weighted feature distance.

    Ties go to the lowest index.

    Raises:
        ValidationError: If the database is empty or the weights are invalid.
    """
    if len(db) == 0:
        raise ValidationError("query on an empty database")
    index, _ = db.index.query(target, weights)
    return index


def query_linear(
    db: BubbleDb, target: FeatureVector, weights: Sequence[float] = DEFAULT_WEIGHTS
) -> int:
    """Brute-force counterpart of :func:`query_nearest`."""
    if len(db) == 0:
        raise ValidationError("query on an empty database")
    return linear_scan(db.features, target, weights)
