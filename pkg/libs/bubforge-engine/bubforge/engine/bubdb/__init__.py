from bubforge.engine.bubdb.container import load_db, save_db
from bubforge.engine.bubdb.database import BubbleDb, build, query_linear, query_nearest
from bubforge.engine.bubdb.kdtree import FeatureKDTree
from bubforge.engine.bubdb.statistics import CorrelationReport, correlation_matrix, feature_statistics

__all__ = [
    "BubbleDb",
    "CorrelationReport",
    "FeatureKDTree",
    "build",
    "correlation_matrix",
    "feature_statistics",
    "load_db",
    "query_linear",
    "query_nearest",
    "save_db",
]
