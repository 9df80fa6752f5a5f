"""Single-bin knapsack with a cardinality bound.

Used as the pricing oracle in column generation, inside local search, and to
compute tolerances of structure vectors.
"""

from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Sequence, Tuple

import numpy as np

from .core import WEIGHT_TOL, Configuration, make_config
from .errors import CapacityError, InputError

EXACT_CAP = 30


@dataclass(frozen=True)
class PricingProblem:
    candidates: Tuple[Tuple[int, Real, Real], ...]  # (id, weight, profit)
    cardinality: int
    capacity: Real = 1

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(tuple(c) for c in self.candidates))
        if isinstance(self.cardinality, bool) or not isinstance(self.cardinality, int) \
                or self.cardinality < 1:
            raise InputError(f"cardinality must be a positive integer, got {self.cardinality!r}")
        seen = set()
        for i, w, p in self.candidates:
            if i in seen:
                raise InputError(f"duplicate candidate id {i}")
            seen.add(i)
            if p < 0:
                raise InputError(f"negative profit for item {i}")
            if not 0 <= w <= 1:
                raise InputError(f"weight of item {i} outside [0,1]")

    def profit(self, config: Sequence[int]):
        table = {i: p for i, _, p in self.candidates}
        return sum((table[i] for i in config), 0)

    def weight(self, config: Sequence[int]):
        table = {i: w for i, w, _ in self.candidates}
        return sum((table[i] for i in config), 0)

    def _exact(self) -> bool:
        vals = [x for _, w, p in self.candidates for x in (w, p)]
        vals.append(self.capacity)
        return all(isinstance(x, (int, Fraction)) for x in vals)

    def _useful(self):
        """Candidates that could ever be chosen: positive profit, fit alone."""
        limit = self.capacity + (0 if self._exact() else WEIGHT_TOL)
        return [c for c in self.candidates if c[2] > 0 and c[1] <= limit]


def _same(a, b, exact):
    if exact:
        return a == b
    return abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))


def solve_exact(p: PricingProblem, cap: int = EXACT_CAP) -> Configuration:
    """Profit-maximal configuration by branch and bound.

    Among optimal sets the lexicographically smallest sorted id tuple wins.
    """
    cands = p._useful()
    if len(cands) > cap:
        raise CapacityError(
            f"{len(cands)} candidate items exceed the exact cap of {cap}; use solve_fptas")
    if not cands:
        return ()
    exact = p._exact()
    tol = 0 if exact else WEIGHT_TOL
    cap_w = p.capacity + tol
    k = p.cardinality
    # Branch on items by decreasing profit so prefix sums give a cardinality bound.
    order = sorted(cands, key=lambda c: (-c[2], c[0]))
    n = len(order)
    ids = [c[0] for c in order]
    ws = [c[1] for c in order]
    ps = [c[2] for c in order]
    by_ratio = sorted(range(n), key=lambda j: (-(ps[j] / ws[j]) if ws[j] > 0 else -float("inf"), j))

    def bound(depth, slots, room):
        # Best possible profit from items depth.. with `slots` picks and `room` capacity.
        top = sum(ps[depth:depth + slots], 0)
        frac = 0
        left = room
        for j in by_ratio:
            if j < depth:
                continue
            if ws[j] <= left:
                frac += ps[j]
                left -= ws[j]
            else:
                if ws[j] > 0:
                    frac += ps[j] * (left / ws[j])
                break
        return min(top, frac)

    best_val = 0
    best_set: Tuple[int, ...] = ()
    chosen = []

    def dfs(depth, val, wt):
        nonlocal best_val, best_set
        if val > best_val and not _same(val, best_val, exact):
            best_val, best_set = val, tuple(sorted(chosen))
        elif _same(val, best_val, exact):
            cand = tuple(sorted(chosen))
            if cand < best_set:
                best_val, best_set = max(val, best_val), cand
        if depth == n or len(chosen) == k:
            return
        ub = val + bound(depth, k - len(chosen), cap_w - wt)
        if ub < best_val and not _same(ub, best_val, exact):
            return
        if wt + ws[depth] <= cap_w:
            chosen.append(ids[depth])
            dfs(depth + 1, val + ps[depth], wt + ws[depth])
            chosen.pop()
        dfs(depth + 1, val, wt)

    dfs(0, 0, 0)
    return best_set


def solve_fptas(p: PricingProblem, eps: float) -> Configuration:
    """Configuration with profit at least (1 - eps) times the optimum.

    Profits are scaled by K = eps * P_max / min(n, k) and rounded down; a DP over
    (count, scaled profit) keeps the minimum weight.  Any feasible set has at most
    min(n, k) members, so the rounding loss is at most eps * P_max <= eps * OPT.
    """
    if not (isinstance(eps, Real) and 0 < eps < 1):
        raise InputError(f"eps must lie in (0,1), got {eps!r}")
    cands = p._useful()
    if not cands:
        return ()
    k = min(p.cardinality, len(cands))
    pmax = max(float(c[2]) for c in cands)
    scale = eps * pmax / k
    q = [int(float(c[2]) // scale) for c in cands]
    keep = [j for j in range(len(cands)) if q[j] > 0]
    cands = [cands[j] for j in keep]
    q = [q[j] for j in keep]
    qtot = sum(sorted(q, reverse=True)[:k])
    cap_w = float(p.capacity) + WEIGHT_TOL

    inf = np.inf
    table = np.full((k + 1, qtot + 1), inf)
    table[0, 0] = 0.0
    takes = []
    for (_, w, _), qi in zip(cands, q):
        w = float(w)
        cand = table[:-1, :qtot + 1 - qi] + w
        cur = table[1:, qi:]
        better = (cand < cur) & (cand <= cap_w)
        take = np.zeros_like(table, dtype=bool)
        take[1:, qi:] = better
        table[1:, qi:] = np.where(better, cand, cur)
        takes.append(np.packbits(take, axis=None))

    feasible = np.isfinite(table)
    best_q = -1
    best_c = 0
    for c in range(k + 1):
        cols = np.nonzero(feasible[c])[0]
        if cols.size and cols[-1] > best_q:
            best_q, best_c = int(cols[-1]), c
    shape = table.shape
    chosen = []
    c, t = best_c, best_q
    for j in range(len(cands) - 1, -1, -1):
        if c == 0:
            break
        take = np.unpackbits(takes[j], count=shape[0] * shape[1]).reshape(shape)
        if take[c, t]:
            chosen.append(cands[j][0])
            c -= 1
            t -= q[j]
    return make_config(chosen)


def solve(p: PricingProblem, eps: float = None, cap: int = EXACT_CAP) -> Configuration:
    """Exact when small enough (or eps is None), otherwise the FPTAS."""
    if eps is None or len(p._useful()) <= cap:
        return solve_exact(p, cap=cap if eps is not None else max(cap, len(p.candidates)))
    return solve_fptas(p, eps)
