from bubforge.engine.features.descriptors import circularity, edge_ratio, extract_features
from bubforge.engine.features.ellipse import EllipseFit, aspect_ratio, fit_ellipse
from bubforge.engine.features.feature_vector import (
    FEATURE_INDEX,
    FEATURE_NAMES,
    FeatureVector,
    as_feature_matrix,
    wrap_angle,
    wrap_angles,
)
from bubforge.engine.features.interpolation import (
    DEFAULT_WEIGHTS,
    feature_distance,
    feature_distances,
    interpolate,
)

__all__ = [
    "DEFAULT_WEIGHTS",
    "EllipseFit",
    "FEATURE_INDEX",
    "FEATURE_NAMES",
    "FeatureVector",
    "as_feature_matrix",
    "aspect_ratio",
    "circularity",
    "edge_ratio",
    "extract_features",
    "feature_distance",
    "feature_distances",
    "fit_ellipse",
    "interpolate",
    "wrap_angle",
    "wrap_angles",
]
