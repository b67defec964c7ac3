from abc import ABC, abstractmethod
from typing import List, Optional, Sequence, Tuple

import numpy as np

from bubforge.engine.assembler.bubble_list import BubbleInstance
from bubforge.engine.bubdb.database import BubbleDb, query_nearest
from bubforge.engine.ccarender.params import CcaParams, CorpusSettings
from bubforge.engine.ccarender.render import FIT_FRACTION, render
from bubforge.engine.errors import ValidationError
from bubforge.engine.features.descriptors import extract_features
from bubforge.engine.features.feature_vector import FeatureVector
from bubforge.engine.features.interpolation import DEFAULT_WEIGHTS
from bubforge.engine.models.bubble_record import BubbleRecord

# largest edge ratio the concentric renderer can draw
MAX_CCA_EDGE = 0.95
CCA_POOL_SIZE = 16


class AbstractBubbleSource(ABC):
    """Supplies the bubble appearance painted for each instance of a scene."""

    name: str = "abstract"

    @abstractmethod
    def feature_pool(self) -> List[FeatureVector]:
        """Vectors whose interpolations give the scene's circularity and edge ratio."""
        pass

    @abstractmethod
    def record_for(self, inst: BubbleInstance) -> Tuple[BubbleRecord, int]:
        """The record to paint for ``inst`` and its index (-1 when rendered on demand)."""
        pass


class DatabaseBubbleSource(AbstractBubbleSource):
    """Nearest database record to each instance's target vector."""

    name = "gan"

    def __init__(self, db: BubbleDb, weights: Sequence[float] = DEFAULT_WEIGHTS):
        self.db = db
        self.weights = tuple(weights)

    def feature_pool(self) -> List[FeatureVector]:
        return self.db.feature_vectors()

    def record_for(self, inst: BubbleInstance) -> Tuple[BubbleRecord, int]:
        index = query_nearest(self.db, inst.target, self.weights)
        return self.db[index], index


class CcaBubbleSource(AbstractBubbleSource):
    """
    Concentric-ellipse bubbles rendered at the instance's size and orientation.

    Produces the conventional synthetic baseline for the same flow spec.
    """

    name = "cca"

    def __init__(self, settings: Optional[CorpusSettings] = None):
        self.settings = settings or CorpusSettings()

    def feature_pool(self) -> List[FeatureVector]:
        e = float(np.mean(self.settings.aspect_range))
        edges = np.linspace(*self.settings.edge_range, CCA_POOL_SIZE)
        return [FeatureVector(e=e, phi=0.0, psi=1.0, m=float(m)) for m in edges]

    def record_for(self, inst: BubbleInstance) -> Tuple[BubbleRecord, int]:
        s = self.settings
        params = CcaParams(
            a=inst.a,
            b=inst.b,
            phi=inst.phi,
            m=min(inst.target.m, MAX_CCA_EDGE),
            i_bg=s.i_bg,
            i_edge=s.i_edge,
            i_in=s.i_in,
            noise=0.0,
        )
        size = int(np.ceil(2.0 * params.extent / FIT_FRACTION)) + 4
        img, mask = render(params, size)
        try:
            features = extract_features(img, mask)
        except ValidationError:
            features = inst.target
        return BubbleRecord(patch=img, mask=mask, features=features), -1
