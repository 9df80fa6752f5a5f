"""Randomized rounding of the configuration LP.

``iterative_rounding`` re-solves the LP on the items still unpacked and samples
a small batch of bins each round; ``oneshot_rounding`` samples every bin from a
single LP solution.
"""

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config_lp import LpProblem, LpSolution, solve_column_generation
from .core import Configuration, FractionalSolution, Instance, Solution
from .errors import InputError, InternalError

MAX_SEED = 2 ** 64 - 1
MAX_LP_EPS = 0.5


@dataclass(frozen=True)
class RoundingParams:
    eps: float
    seed: int = 0
    lp_eps: Optional[float] = None
    mode: str = "practical"  # or "faithful"

    @property
    def inner_eps(self) -> float:
        # eps = 1 is a legal rounding parameter but not a usable LP accuracy
        return min(self.eps, MAX_LP_EPS) if self.lp_eps is None else self.lp_eps

    def validate(self, m: int) -> None:
        if not (0 < self.eps <= 1):
            raise InputError(f"eps must lie in (0,1], got {self.eps}")
        if not (0 < self.inner_eps < 1):
            raise InputError(f"lp_eps must lie in (0,1), got {self.inner_eps}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) \
                or not 0 <= self.seed <= MAX_SEED:
            raise InputError(f"seed must be an integer in [0, 2^64), got {self.seed!r}")
        if self.mode == "practical":
            return
        if self.mode != "faithful":
            raise InputError(f"unknown mode {self.mode!r}")
        eps = Fraction(self.eps).limit_denominator(10 ** 9)
        if not eps < Fraction(1, 10):
            raise InputError("faithful mode needs eps < 0.1")
        inv = 1 / eps
        if inv.denominator != 1:
            raise InputError("faithful mode needs 1/eps to be an integer")
        root = math.isqrt(inv.numerator)
        if root * root != inv.numerator:
            raise InputError("faithful mode needs eps^(-1/2) to be an integer")
        if (eps * m).denominator != 1:
            raise InputError("faithful mode needs eps*m to be an integer")


def schedule(m: int, p: RoundingParams) -> List[int]:
    """Number of bins sampled in each iteration; sums to m."""
    if p.mode == "faithful":
        eps = Fraction(p.eps).limit_denominator(10 ** 9)
        q = int(eps * m)
        return [q] * int(1 / eps)
    q = max(1, int(math.floor(p.eps * m + 1e-9)))
    rounds = max(1, min(int(math.floor(1 / p.eps + 1e-9)), m))
    out = [q] * (rounds - 1)
    out.append(m - q * (rounds - 1))
    return out


def substream(seed: int, j: int, b: int) -> np.random.Generator:
    """Independent generator for draw ``b`` of iteration ``j``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(j, b))))


class ConfigurationSampler:
    """Draws C with probability x_C / ||x|| by inverse CDF over the sorted support."""

    def __init__(self, x: FractionalSolution):
        self.support = x.support()
        weights = np.array([float(x[c]) for c in self.support])
        total = weights.sum() if weights.size else 0.0
        if not total > 0:
            raise InputError("cannot sample from a fractional solution of size zero")
        self.cdf = np.cumsum(weights) / total
        self.cdf[-1] = 1.0

    def probabilities(self):
        return np.diff(np.concatenate([[0.0], self.cdf]))

    def draw(self, rng: np.random.Generator) -> Configuration:
        return self.support[self._index(rng.random())]

    def draw_many(self, rng: np.random.Generator, size: int) -> List[Configuration]:
        idx = np.searchsorted(self.cdf, rng.random(size), side="right")
        return [self.support[min(i, len(self.support) - 1)] for i in idx]

    def _index(self, u: float) -> int:
        return min(int(np.searchsorted(self.cdf, u, side="right")), len(self.support) - 1)


def sample_configuration(x: FractionalSolution, rng: np.random.Generator) -> Configuration:
    return ConfigurationSampler(x).draw(rng)


@dataclass
class IterationRecord:
    j: int
    m_j: int
    q: int
    lp_value: float
    lp_upper_bound: float
    gained: float
    ratio: float  # lp_value / (m_j / m)
    survival_bound: float
    min_survival: float
    remaining_before: int
    remaining_after: int
    packed: List[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _survival(x: FractionalSolution, ids, m_j: int, q: int) -> float:
    """Smallest probability over remaining items of surviving this round's draws."""
    if not ids:
        return 1.0
    cov = x.cover()
    worst = max((float(cov.get(i, 0)) for i in ids), default=0.0)
    return max(0.0, 1.0 - worst / m_j) ** q


def _lp(inst, remaining, ell, p, columns=()) -> LpSolution:
    return solve_column_generation(LpProblem(inst, frozenset(remaining), ell), p.inner_eps,
                                   initial_columns=columns)


def iterative_rounding(inst: Instance, p: RoundingParams,
                       initial_lp: Optional[LpSolution] = None
                       ) -> Tuple[Solution, List[IterationRecord]]:
    """Sample bins in rounds, re-solving the LP on the items left after each round.

    ``initial_lp`` may carry a precomputed solution of LP(I, m) at ``p.inner_eps``;
    it is used for the first round only.
    """
    p.validate(inst.m)
    qs = schedule(inst.m, p)
    remaining = set(inst.ids)
    bins: List[Configuration] = []
    trace: List[IterationRecord] = []
    columns: Sequence[Configuration] = ()
    placed = 0
    for j, q in enumerate(qs, start=1):
        m_j = inst.m - placed
        if j == 1 and initial_lp is not None:
            sol = initial_lp
        else:
            sol = _lp(inst, remaining, m_j, p, columns)
        for c in sol.fractional:
            if not remaining.issuperset(c):
                raise InternalError(f"LP support {c} leaves the remaining items")
        sampler = ConfigurationSampler(sol.fractional)
        drawn = [sampler.draw(substream(p.seed, j, b)) for b in range(q)]
        packed = sorted({i for c in drawn for i in c})
        before = len(remaining)
        survival = _survival(sol.fractional, remaining, m_j, q)
        remaining.difference_update(packed)
        bins.extend(drawn)
        placed += q
        trace.append(IterationRecord(
            j=j, m_j=m_j, q=q, lp_value=float(sol.objective),
            lp_upper_bound=float(sol.upper_bound),
            gained=float(inst.value(packed)), ratio=float(sol.objective) * inst.m / m_j,
            survival_bound=(m_j - q) / m_j, min_survival=survival,
            remaining_before=before, remaining_after=len(remaining), packed=packed))
        columns = [c for c in sol.columns if remaining.issuperset(c)]
    return Solution(tuple(bins)), trace


def oneshot_rounding(inst: Instance, p: RoundingParams,
                     initial_lp: Optional[LpSolution] = None
                     ) -> Tuple[Solution, List[IterationRecord]]:
    """Sample all m bins independently from one solution of LP(I, m)."""
    p.validate(inst.m)
    sol = initial_lp if initial_lp is not None else _lp(inst, inst.ids, inst.m, p)
    sampler = ConfigurationSampler(sol.fractional)
    drawn = [sampler.draw(substream(p.seed, 1, b)) for b in range(inst.m)]
    packed = sorted({i for c in drawn for i in c})
    record = IterationRecord(
        j=1, m_j=inst.m, q=inst.m, lp_value=float(sol.objective),
        lp_upper_bound=float(sol.upper_bound), gained=float(inst.value(packed)),
        ratio=float(sol.objective), survival_bound=0.0,
        min_survival=_survival(sol.fractional, inst.ids, inst.m, inst.m),
        remaining_before=inst.n, remaining_after=inst.n - len(packed), packed=packed)
    return Solution(tuple(drawn)), [record]


def check_bookkeeping(inst: Instance, solution: Solution, trace: Sequence[IterationRecord],
                      tol: float = 1e-6) -> None:
    """Raise if a rounding run breaks its accounting invariants."""
    if len(solution.bins) != inst.m:
        raise InternalError(f"{len(solution.bins)} bins returned for m={inst.m}")
    solution.validate(inst)
    seen = set()
    total = 0.0
    remaining = inst.n
    for rec in trace:
        q = set(rec.packed)
        if q & seen:
            raise InternalError(f"iteration {rec.j} packs items packed earlier")
        seen |= q
        total += rec.gained
        if rec.remaining_before != remaining or rec.remaining_after != remaining - len(q):
            raise InternalError(f"remaining-set sizes inconsistent at iteration {rec.j}")
        remaining = rec.remaining_after
    if seen != set(solution.items()):
        raise InternalError("packed sets do not match the solution's items")
    value = float(solution.value(inst))
    if abs(value - total) > tol:
        raise InternalError(f"value {value} differs from the sum of gains {total}")
    if trace and value > trace[0].lp_upper_bound + tol:
        raise InternalError(f"value {value} exceeds the LP bound {trace[0].lp_upper_bound}")
