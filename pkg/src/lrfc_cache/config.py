"""Network configuration shared by the analysis, placement and simulation code."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

__all__ = [
    "NetworkConfig",
    "REFERENCE_GAMMA",
    "REFERENCE_OVERHEAD_TABLE",
    "SINGLE_HUB",
]

# reference connectivity for a 45 km hub grid with 60 km coverage; default sweep input
REFERENCE_GAMMA = (0.2907, 0.6591, 0.0430, 0.0072)
SINGLE_HUB = (1.0,)

# reference average overhead (k = 10) and its closed-form bound, keyed by q
REFERENCE_OVERHEAD_TABLE = {
    2: (1.1981, None),
    4: (0.3490, 0.6094),
    8: (0.1447, 0.1792),
    16: (0.0669, 0.0720),
    32: (0.0323, 0.0334),
    64: (0.0159, 0.0161),
    128: (0.0079, 0.0079),
}


@dataclass(frozen=True)
class NetworkConfig:
    """All free parameters of one hub/satellite caching scenario.

    ``gamma[h-1]`` is the probability that a user sees exactly h hubs.
    ``M`` is the per-hub cache size in files, so each hub stores ``M*k`` symbols.
    """

    n: int = 100
    k: int = 10
    M: int = 0
    q: int = 128
    alpha: float = 0.0
    gamma: tuple[float, ...] = field(default=SINGLE_HUB)
    seed: int = 0
    trials: int = 100_000

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma", tuple(float(g) for g in self.gamma))
        if self.n < 1:
            raise ValueError(f"library size n must be >= 1, got {self.n}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not 0 <= self.M <= self.n:
            raise ValueError(f"cache size M must lie in [0, n={self.n}], got {self.M}")
        if self.q < 2 or self.q & (self.q - 1) or self.q > 256:
            raise ValueError(f"q must be a power of two in [2, 256], got {self.q}")
        if self.alpha < 0:
            raise ValueError(f"Zipf exponent must be >= 0, got {self.alpha}")
        if not self.gamma or any(g < 0 for g in self.gamma):
            raise ValueError("gamma must be a non-empty list of nonnegative probabilities")
        if abs(sum(self.gamma) - 1.0) > 1e-12:
            raise ValueError(f"gamma must sum to 1, sums to {sum(self.gamma)!r}")
        if self.trials < 0:
            raise ValueError("trials must be >= 0")

    @property
    def budget(self) -> int:
        return self.M * self.k

    @property
    def max_hubs(self) -> int:
        return len(self.gamma)

    def with_(self, **changes) -> NetworkConfig:
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["gamma"] = list(self.gamma)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> NetworkConfig:
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{key: value for key, value in d.items() if key in known})

    @classmethod
    def from_json(cls, path: str | Path) -> NetworkConfig:
        return cls.from_dict(json.loads(Path(path).read_text()))
