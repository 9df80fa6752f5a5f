"""Seeded random instance families."""

from dataclasses import asdict, dataclass
from typing import Mapping

import numpy as np

from .core import Instance, Item
from .errors import InputError

FAMILIES = ("uniform", "correlated", "cardinality-tight")


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    n: int
    m: int
    k: int
    seed: int = 0
    w_min: float = 0.05
    w_max: float = 1.0
    noise: float = 0.1  # correlated family: v = w + U(0, noise)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        for name in ("n", "m", "k"):
            val = getattr(self, name)
            if isinstance(val, bool) or not isinstance(val, int) or val < 1:
                raise InputError(f"{name} must be a positive integer, got {val!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise InputError(f"seed must be a nonnegative integer, got {self.seed!r}")
        if not 0 <= self.w_min <= self.w_max <= 1:
            raise InputError("weight range must satisfy 0 <= w_min <= w_max <= 1")
        if self.noise < 0:
            raise InputError("noise must be nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping) -> "GeneratorSpec":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise InputError(f"unknown generator fields: {sorted(extra)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise InputError(str(exc)) from exc


def generate(spec: GeneratorSpec) -> Instance:
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    if spec.family == "cardinality-tight":
        # any k of these fit together, so only the item count limits a bin
        w = rng.uniform(0.0, min(spec.w_max, 1 / (2 * spec.k)), n)
        v = rng.uniform(0.0, 1.0, n)
    else:
        w = rng.uniform(spec.w_min, spec.w_max, n)
        if spec.family == "uniform":
            v = rng.uniform(0.0, 1.0, n)
        else:
            v = w + rng.uniform(0.0, spec.noise, n)
    items = tuple(Item(i, float(w[i]), float(v[i])) for i in range(n))
    return Instance(items, spec.m, spec.k)
