from abc import ABC, abstractmethod
from typing import Dict, Type

import numpy as np
from numpy.typing import NDArray

from bubforge.engine.assembler.flow_spec import FlowSpec
from bubforge.engine.errors import ValidationError

GRID = 4096


class AbstractLateralProfile(ABC):
    """
    Lateral bubble-center density across the channel.

    Positions are normalized, ``u = 0`` at the left wall and ``u = 1`` at the right wall.
    """

    def __init__(self, peak_sigma: float = 0.12, wall_offset: float = 0.15):
        self.peak_sigma = peak_sigma
        self.wall_offset = wall_offset
        edges = np.linspace(0.0, 1.0, GRID + 1)
        mass = self.density((edges[:-1] + edges[1:]) / 2.0)
        if not np.all(np.isfinite(mass)) or mass.sum() <= 0:
            raise ValidationError(f"{type(self).__name__} has no probability mass in the channel")
        self._edges = edges
        self._cdf = np.concatenate([[0.0], np.cumsum(mass) / mass.sum()])

    @abstractmethod
    def density(self, u: NDArray[np.float64]) -> NDArray[np.float64]:
        """Unnormalized density at normalized positions ``u``."""
        pass

    def sample(self, rng: np.random.Generator, n: int) -> NDArray[np.float64]:
        """``n`` positions in [0, 1] by inverse-CDF sampling."""
        return np.interp(rng.uniform(0.0, 1.0, size=n), self._cdf, self._edges)

    def bin_probabilities(self, bins: int = 10) -> NDArray[np.float64]:
        """Probability of each of ``bins`` equal-width lateral bins."""
        at = np.interp(np.linspace(0.0, 1.0, bins + 1), self._edges, self._cdf)
        return np.diff(at)


def _gaussian(u: NDArray[np.float64], mu: float, sigma: float) -> NDArray[np.float64]:
    return np.exp(-0.5 * ((u - mu) / sigma) ** 2)


class UniformProfile(AbstractLateralProfile):
    def density(self, u: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.ones_like(u)


class CenterProfile(AbstractLateralProfile):
    """Single peak at mid-width."""

    def density(self, u: NDArray[np.float64]) -> NDArray[np.float64]:
        return _gaussian(u, 0.5, self.peak_sigma)


class DoubleProfile(AbstractLateralProfile):
    """Two peaks, ``wall_offset`` of the width away from each wall."""

    def density(self, u: NDArray[np.float64]) -> NDArray[np.float64]:
        return _gaussian(u, self.wall_offset, self.peak_sigma) + _gaussian(
            u, 1.0 - self.wall_offset, self.peak_sigma
        )


class SideProfile(AbstractLateralProfile):
    """Single peak at the left wall."""

    def density(self, u: NDArray[np.float64]) -> NDArray[np.float64]:
        return _gaussian(u, 0.0, self.peak_sigma)


PROFILE_TYPES: Dict[str, Type[AbstractLateralProfile]] = {
    "uniform": UniformProfile,
    "center": CenterProfile,
    "double": DoubleProfile,
    "side": SideProfile,
}


def make_profile(spec: FlowSpec) -> AbstractLateralProfile:
    try:
        cls = PROFILE_TYPES[spec.profile]
    except KeyError:
        raise ValidationError(f"unknown profile {spec.profile!r}") from None
    return cls(peak_sigma=spec.peak_sigma, wall_offset=spec.wall_offset)


def total_variation(counts: NDArray[np.float64], expected: NDArray[np.float64]) -> float:
    """Total-variation distance between a histogram and bin probabilities."""
    p = np.asarray(counts, dtype=np.float64)
    p = p / p.sum()
    return 0.5 * float(np.abs(p - np.asarray(expected, dtype=np.float64)).sum())
