"""Exact optimum for tiny instances by branch and bound."""

import time
from dataclasses import dataclass
from typing import Optional, Tuple

from .core import WEIGHT_TOL, Instance, Solution
from .errors import CapacityError, InputError, OracleTimeout


@dataclass(frozen=True)
class OracleLimits:
    max_items: int = 10
    max_bins: int = 3
    timeout: Optional[float] = None  # seconds

    def __post_init__(self):
        if self.max_items < 1 or self.max_bins < 1:
            raise InputError("oracle limits must be positive")
        if self.timeout is not None and self.timeout <= 0:
            raise InputError("timeout must be positive")


def solve_exact_cmk(inst: Instance, lim: OracleLimits = OracleLimits()) -> Tuple[Solution, float]:
    """Optimal solution and its value.

    Items are branched on in order of decreasing value: each goes to one of the
    bins or is left out.  Empty bins are interchangeable, so an item may open at
    most one new bin (the lowest-indexed empty one).  Nodes are pruned with the
    fractional single-knapsack bound on the pooled remaining capacity, capped by
    the best values that fit in the remaining item slots.
    """
    if inst.n > lim.max_items:
        raise CapacityError(f"{inst.n} items exceed the oracle limit of {lim.max_items}")
    if inst.m > lim.max_bins:
        raise CapacityError(f"{inst.m} bins exceed the oracle limit of {lim.max_bins}")
    deadline = None if lim.timeout is None else time.monotonic() + lim.timeout
    items = sorted((it for it in inst.items if it.value > 0), key=lambda it: (-it.value, it.id))
    n, m, k = len(items), inst.m, inst.k
    w = [it.weight for it in items]
    v = [it.value for it in items]
    by_density = sorted(range(n), key=lambda j: (-(v[j] / w[j]) if w[j] > 0 else -float("inf"), j))

    loads = [0] * m
    counts = [0] * m
    assign = [-1] * n
    best_val = 0
    best_assign = [-1] * n
    nodes = 0

    def bound(depth):
        slots = sum(k - c for c in counts)
        room = sum(1 + WEIGHT_TOL - ld for ld in loads)
        top = sum(v[depth:depth + slots])
        frac = 0
        for j in by_density:
            if j < depth:
                continue
            if w[j] <= room:
                frac += v[j]
                room -= w[j]
            else:
                frac += v[j] * room / w[j]
                break
        return min(top, frac)

    def dfs(depth, val, used):
        nonlocal best_val, best_assign, nodes
        nodes += 1
        if deadline is not None and nodes % 1000 == 0 and time.monotonic() > deadline:
            raise OracleTimeout("exact oracle timed out", best=_build(best_assign),
                                best_value=best_val, upper_bound=val + bound(depth))
        if val > best_val:
            best_val, best_assign = val, assign[:]
        if depth == n or val + bound(depth) <= best_val:
            return
        for b in range(min(used + 1, m)):
            if counts[b] < k and loads[b] + w[depth] <= 1 + WEIGHT_TOL:
                loads[b] += w[depth]
                counts[b] += 1
                assign[depth] = b
                dfs(depth + 1, val + v[depth], max(used, b + 1))
                loads[b] -= w[depth]
                counts[b] -= 1
                assign[depth] = -1
        dfs(depth + 1, val, used)

    def _build(asg):
        bins = [[] for _ in range(m)]
        for j, b in enumerate(asg):
            if b >= 0:
                bins[b].append(items[j].id)
        return Solution(tuple(tuple(b) for b in bins))

    dfs(0, 0, 0)
    sol = _build(best_assign)
    return sol, sol.value(inst)
