import math
from dataclasses import dataclass, field
from typing import Tuple

from bubforge.engine.errors import ValidationError

MAX_WOBBLE = 0.15
FIRST_HARMONIC = 2
LAST_HARMONIC = 5


@dataclass(frozen=True)
class CcaParams:
    """
    Concentric-ellipse bubble appearance.

    ``wobble`` holds ``(amplitude, phase)`` pairs for the boundary harmonics n = 2, 3, ...;
    the inner bright region is the outer shape scaled by ``sqrt(1 - m)`` so the dark band
    covers exactly the fraction ``m`` of the projected area.
    """

    a: float
    b: float
    phi: float = 0.0
    m: float = 0.2
    wobble: Tuple[Tuple[float, float], ...] = field(default_factory=tuple)
    i_bg: float = 0.88
    i_edge: float = 0.15
    i_in: float = 0.65
    noise: float = 0.02

    def __post_init__(self) -> None:
        if not self.a >= self.b > 0:
            raise ValidationError(f"semi-axes must satisfy a >= b > 0, got a={self.a}, b={self.b}")
        if not 0.0 <= self.m < 1.0:
            raise ValidationError(f"edge ratio m={self.m} outside [0, 1)")
        if len(self.wobble) > LAST_HARMONIC - FIRST_HARMONIC + 1:
            raise ValidationError(f"at most {LAST_HARMONIC - FIRST_HARMONIC + 1} wobble harmonics")
        for amplitude, _ in self.wobble:
            if not 0.0 <= amplitude <= MAX_WOBBLE:
                raise ValidationError(f"wobble amplitude {amplitude} outside [0, {MAX_WOBBLE}]")
        for name in ("i_bg", "i_edge", "i_in"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValidationError(f"{name} outside [0, 1]")
        if not self.i_edge < self.i_in < self.i_bg:
            raise ValidationError("intensities must satisfy i_edge < i_in < i_bg")
        if self.noise < 0:
            raise ValidationError(f"noise sigma must be >= 0, got {self.noise}")

    @property
    def inner_scale(self) -> float:
        return math.sqrt(1.0 - self.m)

    @property
    def wobble_sum(self) -> float:
        return sum(amplitude for amplitude, _ in self.wobble)

    @property
    def extent(self) -> float:
        """Upper bound on the outer radius in any direction."""
        return max(self.a, self.b) * (1.0 + self.wobble_sum)

    @classmethod
    def from_diameter(cls, diameter: float, aspect: float, **kwargs: object) -> "CcaParams":
        """Semi-axes from the equivalent diameter ``d = 2 sqrt(ab)`` and aspect ratio ``b/a``."""
        root = math.sqrt(aspect)
        return cls(a=diameter / (2.0 * root), b=diameter * root / 2.0, **kwargs)  # type: ignore[arg-type]


@dataclass(frozen=True)
class CorpusSettings:
    """Sampling ranges of the rendered training corpus."""

    aspect_range: Tuple[float, float] = (0.4, 1.0)
    edge_range: Tuple[float, float] = (0.05, 0.9)
    wobble_max: float = 0.08
    diameter_range: Tuple[float, float] = (40.0, 80.0)
    i_bg: float = 0.88
    i_edge: float = 0.15
    i_in: float = 0.65
    noise: float = 0.02
    margin: int = 8
    max_attempts: int = 5

    def __post_init__(self) -> None:
        lo, hi = self.aspect_range
        if not 0.0 < lo <= hi <= 1.0:
            raise ValidationError(f"aspect_range {self.aspect_range} must lie in (0, 1]")
        lo, hi = self.edge_range
        if not 0.0 <= lo <= hi < 1.0:
            raise ValidationError(f"edge_range {self.edge_range} must lie in [0, 1)")
        if not 0.0 <= self.wobble_max <= MAX_WOBBLE:
            raise ValidationError(f"wobble_max must lie in [0, {MAX_WOBBLE}]")
        lo, hi = self.diameter_range
        if not 0.0 < lo <= hi:
            raise ValidationError(f"diameter_range {self.diameter_range} invalid")
