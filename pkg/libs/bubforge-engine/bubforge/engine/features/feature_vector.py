import math
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from bubforge.engine.errors import ValidationError

HALF_PI = math.pi / 2.0

# serialization order in every file and CLI output
FEATURE_NAMES: Tuple[str, str, str, str] = ("E", "phi", "psi", "m")
FEATURE_INDEX: Dict[str, int] = {name: i for i, name in enumerate(FEATURE_NAMES)}


def wrap_angle(phi: float) -> float:
    """Maps an angle onto its period-pi representative in (-pi/2, pi/2]."""
    wrapped = (phi + HALF_PI) % math.pi - HALF_PI
    if wrapped <= -HALF_PI:
        wrapped += math.pi
    return wrapped


def wrap_angles(phi: ArrayLike) -> NDArray[np.float64]:
    """Vectorized :func:`wrap_angle`."""
    wrapped = np.mod(np.asarray(phi, dtype=np.float64) + HALF_PI, math.pi) - HALF_PI
    return np.where(wrapped <= -HALF_PI, wrapped + math.pi, wrapped)


@dataclass(frozen=True)
class FeatureVector:
    """
    The bubble conditioning vector k = [E, phi, psi, m].

    Attributes:
        e: aspect ratio b/a of the fitted ellipse, in (0, 1].
        phi: rotation of the semi-major axis from +x, anti-clockwise, in (-pi/2, pi/2].
        psi: circularity 4 pi A / P^2, in (0, 1].
        m: dark-edge area over projected area, in [0, 1].
    """

    e: float
    phi: float
    psi: float
    m: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.e, self.phi, self.psi, self.m)):
            raise ValidationError(f"non-finite feature vector {self.to_list()}")
        if not 0.0 < self.e <= 1.0:
            raise ValidationError(f"aspect ratio E={self.e} outside (0, 1]")
        if not -HALF_PI < self.phi <= HALF_PI:
            raise ValidationError(f"rotation phi={self.phi} outside (-pi/2, pi/2]")
        if not 0.0 < self.psi <= 1.0:
            raise ValidationError(f"circularity psi={self.psi} outside (0, 1]")
        if not 0.0 <= self.m <= 1.0:
            raise ValidationError(f"edge ratio m={self.m} outside [0, 1]")

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "FeatureVector":
        """Builds a vector from ``[E, phi, psi, m]``; phi is wrapped into range."""
        if len(values) != 4:
            raise ValidationError(f"feature vector needs 4 components, got {len(values)}")
        e, phi, psi, m = (float(v) for v in values)
        return cls(e, wrap_angle(phi), psi, m)

    def to_list(self) -> list[float]:
        return [self.e, self.phi, self.psi, self.m]

    def to_array(self) -> NDArray[np.float64]:
        return np.array(self.to_list(), dtype=np.float64)

    def to_dict(self) -> Dict[str, float]:
        return dict(zip(FEATURE_NAMES, self.to_list()))

    def replace(self, component: str, value: float) -> "FeatureVector":
        """Copy with one named component (``E``, ``phi``, ``psi`` or ``m``) overridden."""
        values = self.to_list()
        try:
            values[FEATURE_INDEX[component]] = value
        except KeyError:
            raise ValidationError(
                f"unknown feature component {component!r}, expected one of {FEATURE_NAMES}"
            ) from None
        return FeatureVector.from_sequence(values)


def as_feature_matrix(vectors: Sequence[FeatureVector]) -> NDArray[np.float64]:
    """Stacks vectors into an (n, 4) array in serialization order."""
    if not vectors:
        return np.zeros((0, 4), dtype=np.float64)
    return np.array([v.to_list() for v in vectors], dtype=np.float64)
