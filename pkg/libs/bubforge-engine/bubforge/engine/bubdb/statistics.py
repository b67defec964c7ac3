from dataclasses import dataclass
from typing import Dict

import numpy as np
import pandas as pd

from bubforge.engine.bubdb.database import BubbleDb
from bubforge.engine.errors import ValidationError
from bubforge.engine.features.feature_vector import FEATURE_NAMES

MIN_RECORDS = 3


@dataclass
class CorrelationReport:
    """
    Pearson correlation of ``[E, phi, psi, m]`` across records.

    ``degenerate[i, j]`` is set when component i or j has zero variance; such entries are
    reported as 0 off the diagonal.
    """

    matrix: np.ndarray
    degenerate: np.ndarray

    def to_dict(self) -> Dict[str, object]:
        return {
            "components": list(FEATURE_NAMES),
            "matrix": self.matrix.tolist(),
            "degenerate": self.degenerate.tolist(),
        }


def feature_frame(db: BubbleDb) -> pd.DataFrame:
    return pd.DataFrame(db.features, columns=list(FEATURE_NAMES))


def correlation_matrix(db: BubbleDb) -> CorrelationReport:
    """
    Raises:
        ValidationError: If the database holds fewer than 3 records.
    """
    if len(db) < MIN_RECORDS:
        raise ValidationError(f"correlation needs at least {MIN_RECORDS} records, got {len(db)}")
    frame = feature_frame(db)
    flat = (frame.max() - frame.min()).to_numpy() == 0.0
    corr = frame.corr(method="pearson").to_numpy(copy=True)
    corr = np.clip(np.nan_to_num(corr, nan=0.0), -1.0, 1.0)
    corr = (corr + corr.T) / 2.0
    degenerate = (flat[:, None] | flat[None, :]) & ~np.eye(len(FEATURE_NAMES), dtype=bool)
    corr[degenerate] = 0.0
    np.fill_diagonal(corr, 1.0)
    return CorrelationReport(matrix=corr, degenerate=degenerate)


def feature_statistics(db: BubbleDb) -> pd.DataFrame:
    """count/mean/std/min/quartiles/max of every feature component."""
    if len(db) == 0:
        raise ValidationError("statistics of an empty database")
    return feature_frame(db).describe()


def statistics_to_dict(stats: pd.DataFrame) -> Dict[str, Dict[str, float]]:
    return {str(c): {str(k): float(v) for k, v in stats[c].items()} for c in stats.columns}
