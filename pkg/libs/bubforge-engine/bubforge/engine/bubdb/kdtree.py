import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from bubforge.engine.features.feature_vector import HALF_PI, FeatureVector
from bubforge.engine.features.interpolation import DEFAULT_WEIGHTS, check_weights, feature_distances

LEAF_SIZE = 16
PHI = 1
# relative slack on the pruning bound so rounding never hides an exact tie
_SLACK = 1e-12


@dataclass
class _Node:
    lo: NDArray[np.float64]
    hi: NDArray[np.float64]
    indices: Optional[NDArray[np.intp]] = None
    left: Optional["_Node"] = None
    right: Optional["_Node"] = None


class FeatureKDTree:
    """
    Exact nearest-neighbor index over [E, phi, psi, m] under the weighted feature distance.

    Leaves are scored with the same vectorized distance as a linear scan, ties go to the
    lowest record index and the period-pi phi axis is handled by bounding each box against
    the query and its images shifted by +-pi. Results therefore equal a linear-scan argmin.
    """

    def __init__(self, features: NDArray[np.float64], leaf_size: int = LEAF_SIZE) -> None:
        self.features = np.asarray(features, dtype=np.float64).reshape(-1, 4)
        self.leaf_size = leaf_size
        self.root = self._build(np.arange(len(self.features))) if len(self.features) else None

    def __len__(self) -> int:
        return len(self.features)

    def _build(self, indices: NDArray[np.intp]) -> _Node:
        points = self.features[indices]
        node = _Node(lo=points.min(axis=0), hi=points.max(axis=0))
        if len(indices) <= self.leaf_size:
            node.indices = np.sort(indices)
            return node
        dim = int(np.argmax(node.hi - node.lo))
        order = np.argsort(points[:, dim], kind="stable")
        half = len(indices) // 2
        node.left = self._build(indices[order[:half]])
        node.right = self._build(indices[order[half:]])
        return node

    @staticmethod
    def _bound(node: _Node, q: NDArray[np.float64], w: NDArray[np.float64]) -> float:
        gap = np.maximum(np.maximum(node.lo - q, q - node.hi), 0.0)
        phi_gap = min(
            max(node.lo[PHI] - (q[PHI] + shift), (q[PHI] + shift) - node.hi[PHI], 0.0)
            for shift in (-math.pi, 0.0, math.pi)
        )
        gap[PHI] = phi_gap / HALF_PI
        return float(math.sqrt(float((gap * gap) @ w)))

    def query(self, target: FeatureVector, weights: Sequence[float] = DEFAULT_WEIGHTS) -> Tuple[int, float]:
        """(index, distance) of the nearest record; (-1, inf) for an empty tree."""
        w = check_weights(weights)
        q = target.to_array()
        best: List[float] = [math.inf, -1]
        if self.root is not None:
            self._search(self.root, target, q, w, weights, best)
        return int(best[1]), float(best[0])

    def _search(
        self,
        node: _Node,
        target: FeatureVector,
        q: NDArray[np.float64],
        w: NDArray[np.float64],
        weights: Sequence[float],
        best: List[float],
    ) -> None:
        if self._bound(node, q, w) > best[0] * (1.0 + _SLACK) + _SLACK:
            return
        if node.indices is not None:
            d = feature_distances(target, self.features[node.indices], weights)
            i = int(np.argmin(d))
            if d[i] < best[0] or (d[i] == best[0] and node.indices[i] < best[1]):
                best[0], best[1] = float(d[i]), int(node.indices[i])
            return
        assert node.left is not None and node.right is not None
        children = sorted((node.left, node.right), key=lambda c: self._bound(c, q, w))
        for child in children:
            self._search(child, target, q, w, weights, best)


def linear_scan(
    features: NDArray[np.float64], target: FeatureVector, weights: Sequence[float] = DEFAULT_WEIGHTS
) -> int:
    """Brute-force argmin of the weighted feature distance, lowest index on ties."""
    return int(np.argmin(feature_distances(target, features, weights)))
