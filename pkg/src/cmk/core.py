"""Instances, configurations, integral and fractional solutions."""

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .errors import InputError

# Absolute slack on weight sums when working with floats.
WEIGHT_TOL = 1e-9

Configuration = Tuple[int, ...]
CoverVector = Dict[int, Real]

EMPTY: Configuration = ()


def make_config(ids: Iterable[int]) -> Configuration:
    """Canonical form of a configuration: sorted tuple of distinct ids."""
    ids = tuple(sorted(set(ids)))
    return ids


def _check_number(x, what):
    if isinstance(x, bool) or not isinstance(x, Real):
        raise InputError(f"{what} must be a real number, got {x!r}")
    if x != x:
        raise InputError(f"{what} is NaN")


@dataclass(frozen=True)
class Item:
    id: int
    weight: Real
    value: Real

    def __post_init__(self):
        if isinstance(self.id, bool) or not isinstance(self.id, int):
            raise InputError(f"item id must be an integer, got {self.id!r}")
        _check_number(self.weight, f"weight of item {self.id}")
        _check_number(self.value, f"value of item {self.id}")
        if not 0 <= self.weight <= 1:
            raise InputError(f"weight of item {self.id} outside [0,1]: {self.weight}")
        if self.value < 0:
            raise InputError(f"value of item {self.id} is negative: {self.value}")


@dataclass(frozen=True)
class Instance:
    items: Tuple[Item, ...]
    m: int
    k: int
    _index: Dict[int, Item] = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        for name in ("m", "k"):
            val = getattr(self, name)
            if isinstance(val, bool) or not isinstance(val, int) or val < 1:
                raise InputError(f"{name} must be a positive integer, got {val!r}")
        index = {}
        for it in self.items:
            if not isinstance(it, Item):
                raise InputError(f"expected Item, got {type(it).__name__}")
            if it.id in index:
                raise InputError(f"duplicate item id {it.id}")
            index[it.id] = it
        object.__setattr__(self, "_index", index)

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def ids(self) -> Tuple[int, ...]:
        return tuple(it.id for it in self.items)

    def item(self, i: int) -> Item:
        try:
            return self._index[i]
        except KeyError:
            raise InputError(f"unknown item id {i}") from None

    def __contains__(self, i) -> bool:
        return i in self._index

    def weight(self, ids: Iterable[int]):
        return sum((self.item(i).weight for i in ids), 0)

    def value(self, ids: Iterable[int]):
        return sum((self.item(i).value for i in ids), 0)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "k": self.k,
            "items": [{"id": it.id, "w": _jsonable(it.weight), "v": _jsonable(it.value)}
                      for it in self.items],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Instance":
        if not isinstance(data, Mapping):
            raise InputError("instance JSON must be an object")
        try:
            items = [Item(int(d["id"]), d["w"], d["v"]) for d in data["items"]]
            return cls(tuple(items), data["m"], data["k"])
        except InputError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed instance JSON: {exc}") from None

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Instance":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()

    def restrict(self, ids: Iterable[int]) -> "Instance":
        keep = set(ids)
        return Instance(tuple(it for it in self.items if it.id in keep), self.m, self.k)


def _jsonable(x):
    if isinstance(x, Fraction):
        return float(x) if x.denominator != 1 else int(x)
    return x


def dumps(obj) -> str:
    """Deterministic JSON encoding used for every file this package writes."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_weight_ok(total, tol=None) -> bool:
    if tol is None:
        tol = 0 if isinstance(total, (int, Fraction)) else WEIGHT_TOL
    return total <= 1 + tol


def validate_configuration(inst: Instance, c: Iterable[int], tol=None) -> bool:
    """True iff ``c`` fits one bin. Exact comparison for rational weights."""
    c = tuple(c)
    if len(set(c)) != len(c):
        raise InputError(f"configuration lists an item twice: {c}")
    total = inst.weight(c)  # raises on unknown ids
    return len(c) <= inst.k and config_weight_ok(total, tol)


@dataclass(frozen=True)
class Solution:
    bins: Tuple[Configuration, ...]

    def __post_init__(self):
        object.__setattr__(self, "bins", tuple(make_config(b) for b in self.bins))

    @classmethod
    def padded(cls, inst: Instance, bins: Sequence[Iterable[int]]) -> "Solution":
        bins = list(bins)
        if len(bins) > inst.m:
            raise InputError(f"{len(bins)} bins for an instance with m={inst.m}")
        return cls(tuple(bins) + (EMPTY,) * (inst.m - len(bins)))

    def items(self) -> frozenset:
        return frozenset(i for b in self.bins for i in b)

    def validate(self, inst: Instance) -> None:
        if len(self.bins) != inst.m:
            raise InputError(f"solution has {len(self.bins)} bins, expected {inst.m}")
        for b, c in enumerate(self.bins):
            if not validate_configuration(inst, c):
                raise InputError(f"bin {b} is not a valid configuration: {c}")

    def value(self, inst: Instance):
        return solution_value(inst, self)

    def to_dict(self) -> dict:
        return {"bins": [list(b) for b in self.bins]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "Solution":
        try:
            return cls(tuple(tuple(int(i) for i in b) for b in data["bins"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed solution JSON: {exc}") from None


def solution_value(inst: Instance, s: Solution):
    """Value of the union of the bins; each item counts once."""
    s.validate(inst)
    return inst.value(sorted(s.items()))


class FractionalSolution:
    """Sparse nonnegative weighting of configurations; equal keys merge."""

    __slots__ = ("_w",)

    def __init__(self, weights=None):
        acc: Dict[Configuration, Real] = {}
        if weights is not None:
            pairs = weights.items() if isinstance(weights, Mapping) else weights
            for c, x in pairs:
                if x < 0:
                    raise InputError(f"negative weight {x} on configuration {c}")
                if x == 0:
                    continue
                key = make_config(c)
                acc[key] = acc.get(key, 0) + x
        self._w = acc

    @property
    def weights(self) -> Dict[Configuration, Real]:
        return dict(self._w)

    def items(self):
        return self._w.items()

    def __getitem__(self, c) -> Real:
        return self._w.get(make_config(c), 0)

    def __len__(self):
        return len(self._w)

    def __iter__(self):
        return iter(self._w)

    def __eq__(self, other):
        return isinstance(other, FractionalSolution) and self._w == other._w

    def __add__(self, other: "FractionalSolution") -> "FractionalSolution":
        return FractionalSolution(list(self._w.items()) + list(other._w.items()))

    def __repr__(self):
        return f"FractionalSolution({self._w!r})"

    def size(self):
        return sum(self._w.values(), 0)

    def cover(self) -> CoverVector:
        return cover(self)

    def value(self, inst: Instance):
        cov = self.cover()
        return sum((inst.item(i).value * y for i, y in sorted(cov.items())), 0)

    def support(self):
        return sorted(self._w)

    def to_dict(self) -> dict:
        return {"configurations": [{"items": list(c), "x": _jsonable(x)}
                                   for c, x in sorted(self._w.items())]}


def cover(x: FractionalSolution) -> CoverVector:
    out: CoverVector = {}
    for c, xc in x.items():
        for i in c:
            out[i] = out.get(i, 0) + xc
    return out


def integral_encoding(s: Solution) -> FractionalSolution:
    """The fractional solution that puts weight one on each nonempty bin."""
    return FractionalSolution([(b, 1) for b in s.bins if b])
