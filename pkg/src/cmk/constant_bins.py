"""Enumeration scheme for few bins, the local-search baseline and the dispatcher.

The scheme guesses, for every value band of the valuable items, how many of
the lightest band members each bin receives, then fills the leftover room with
low-value items through an assignment LP whose basic optimum has few
fractional entries.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from . import knapsack
from .core import WEIGHT_TOL, Configuration, Instance, Solution, make_config
from .errors import BudgetError, InputError, InternalError
from .simplex import DenseLp, solve_vertex_lp

LOCAL_SEARCH_EPS = Fraction(5, 28)
DEFAULT_BUDGET = 10 ** 6
M_SWITCH = 16
FRACTIONAL_TOL = 1e-9


def local_search(inst: Instance, eps: float = LOCAL_SEARCH_EPS,
                 theta: Optional[float] = None) -> Solution:
    """Bin-rewrite local search.

    Each move re-packs one bin optimally (up to ``eps``) over the items not held by
    other bins and is kept only if the total value grows by more than a factor
    ``1 + theta``.  ``theta`` defaults to ``eps / m``.
    """
    m, k = inst.m, inst.k
    theta = float(eps) / m if theta is None else theta
    bins: List[Configuration] = [()] * m
    owner: Dict[int, int] = {}
    useful = [it for it in inst.items if it.value > 0]
    current = 0.0
    improved = True
    while improved:
        improved = False
        for b in range(m):
            cands = tuple((it.id, it.weight, it.value) for it in useful
                          if owner.get(it.id, b) == b)
            new_bin = knapsack.solve(knapsack.PricingProblem(cands, k), float(eps))
            delta = float(inst.value(new_bin)) - float(inst.value(bins[b]))
            if delta > 0 and current + delta > current * (1 + theta):
                for i in bins[b]:
                    del owner[i]
                for i in new_bin:
                    owner[i] = b
                bins[b] = new_bin
                current += delta
                improved = True
    return Solution(tuple(bins))


def band_count(eps: float, m: int) -> int:
    """Number of geometric bands reaching down to ratio 4*eps/m."""
    target = 4 * eps / m
    if target >= 1:
        return 1
    return max(1, math.ceil(math.log(target) / math.log(1 - eps) - 1e-12))


def band_of(ratio: float, eps: float) -> int:
    """r >= 1 with ratio in ((1-eps)^r, (1-eps)^(r-1)]; ratios above 1 map to 1."""
    if ratio > 1:
        return 1
    if ratio <= 0:
        raise InputError("band ratios must be positive")
    base = 1 - eps
    r = max(1, int(math.floor(math.log(ratio) / math.log(base))) + 1)
    while ratio <= base ** r:
        r += 1
    while r > 1 and ratio > base ** (r - 1):
        r -= 1
    return r


@dataclass(frozen=True)
class ValueBandTable:
    eps: float
    threshold: float
    valuable: FrozenSet[int]
    bands: Dict[int, Tuple[int, ...]]  # band -> ids by (weight, id)
    count: int  # nominal number of bands; sparse low-ratio items may sit beyond it

    def first(self, r: int, n: int) -> Tuple[int, ...]:
        return first_items(self, r, n)


def build_value_bands(inst: Instance, eps: float, ls_value: float) -> ValueBandTable:
    count = band_count(eps, inst.m)
    if not ls_value > 0:
        return ValueBandTable(eps, 0.0, frozenset(), {}, count)
    d = eps * ls_value / inst.m
    valuable = [it for it in inst.items if it.value >= d and it.value > 0]
    bands: Dict[int, list] = {}
    for it in valuable:
        bands.setdefault(band_of(float(it.value) / (4 * ls_value), eps), []).append(it)
    table = {r: tuple(it.id for it in sorted(members, key=lambda it: (it.weight, it.id)))
             for r, members in sorted(bands.items())}
    return ValueBandTable(eps, d, frozenset(it.id for it in valuable), table, count)


def first_items(table: ValueBandTable, r: int, n: int) -> Tuple[int, ...]:
    """The min(n, |G_r|) lightest items of band r."""
    if n < 0:
        raise InputError("n must be nonnegative")
    return table.bands.get(r, ())[:n]


@dataclass
class AssignLpResult:
    status: str  # optimal | infeasible
    x: Dict[Tuple[int, int], float] = field(default_factory=dict)  # (item, bin) -> value
    objective: float = 0.0
    fractional_count: int = 0

    def integral_items(self, b: int) -> List[int]:
        return sorted(i for (i, bb), val in self.x.items() if bb == b and val >= 1 - FRACTIONAL_TOL)


def solve_assign_lp(inst: Instance, valuable, U: Sequence[Sequence[int]]) -> AssignLpResult:
    """Basic optimum of the LP placing non-valuable items into the room left by ``U``.

    Variables x[i, b] for non-valuable i; per bin, weight and cardinality are
    capped by what ``U[b]`` leaves, and each item is used at most once in total.
    The bounds x <= 1 follow from the per-item rows and are not added.
    """
    m, k = inst.m, inst.k
    if len(U) != m:
        raise InputError(f"expected {m} valuable sets, got {len(U)}")
    valuable = frozenset(valuable)
    room_w, room_c = [], []
    for b, ub in enumerate(U):
        if not valuable.issuperset(ub):
            raise InputError(f"bin {b} holds non-valuable items")
        wb = inst.weight(ub)
        if wb > 1 + WEIGHT_TOL or len(ub) > k:
            return AssignLpResult("infeasible")
        room_w.append(max(0.0, 1 - float(wb)))
        room_c.append(k - len(ub))
    rest = [it for it in inst.items if it.id not in valuable]
    if not rest:
        return AssignLpResult("optimal")
    nv = len(rest)
    nvar = nv * m
    A = np.zeros((2 * m + nv, nvar))
    for t, it in enumerate(rest):
        for b in range(m):
            col = t * m + b
            A[b, col] = float(it.weight)
            A[m + b, col] = 1.0
            A[2 * m + t, col] = 1.0
    rhs = np.concatenate([room_w, room_c, np.ones(nv)])
    c = np.repeat([float(it.value) for it in rest], m)
    res = solve_vertex_lp(DenseLp(c=c, A_ub=A, b_ub=rhs))
    if res.status != "optimal":
        raise InternalError(f"assignment LP reported {res.status}")
    x = {}
    frac = 0
    for t, it in enumerate(rest):
        for b in range(m):
            val = float(res.x[t * m + b])
            if val > FRACTIONAL_TOL:
                x[(it.id, b)] = val
                if val < 1 - FRACTIONAL_TOL:
                    frac += 1
    if frac > 4 * m:
        raise InternalError(f"basic optimum has {frac} fractional entries, more than 4m={4 * m}")
    return AssignLpResult("optimal", x, float(res.objective), frac)


def refined_eps(eps_prime: float) -> float:
    return min(0.5, eps_prime / 5)


def per_bin_cap(table: ValueBandTable, inst: Instance) -> int:
    return min(inst.k, 4 * int(math.floor(inst.m / table.eps)))


def estimate_guesses(inst: Instance, table: ValueBandTable) -> int:
    """Upper bound on the guesses enumerated: per band, every prefix length and
    every way to hand the prefix out to bins."""
    m = inst.m
    cap = per_bin_cap(table, inst)
    total = 1
    for members in table.bands.values():
        top = min(len(members), m * cap)
        total *= sum(m ** n for n in range(top + 1))
    return total


def constant_bins(inst: Instance, eps_prime: float, budget: int = DEFAULT_BUDGET,
                  ls: Optional[Solution] = None) -> Solution:
    """Best packing over all guesses of valuable items per bin.

    For each band, a prefix of its lightest members is split among the bins
    (bins are interchangeable, so a new bin is only opened after the previous
    ones).  The remaining room goes to the assignment LP and only its integral
    entries are kept.
    """
    if not 0 < eps_prime < 1:
        raise InputError(f"eps_prime must lie in (0,1), got {eps_prime}")
    eps = refined_eps(eps_prime)
    if ls is None:
        ls = local_search(inst)
    ls_value = float(ls.value(inst))
    table = build_value_bands(inst, eps, ls_value)
    estimate = estimate_guesses(inst, table)
    if estimate > budget:
        raise BudgetError(f"about {estimate} guesses exceed the budget of {budget}",
                          estimate=estimate, budget=budget)
    m, k = inst.m, inst.k
    cap = per_bin_cap(table, inst)
    weight = {it.id: it.weight for it in inst.items}
    rest_value = float(inst.value(it.id for it in inst.items if it.id not in table.valuable))
    bands = [table.bands[r] for r in sorted(table.bands)]

    bins: List[List[int]] = [[] for _ in range(m)]
    loads = [0] * m
    band_counts = [0] * m
    best = [ls_value, [tuple(b) for b in ls.bins]]

    def evaluate():
        u_value = float(inst.value(i for b in bins for i in b))
        if u_value + rest_value <= best[0]:
            return
        res = solve_assign_lp(inst, table.valuable, bins)
        if res.status != "optimal":
            return
        cand = [list(bins[b]) + res.integral_items(b) for b in range(m)]
        for c in cand:
            if len(c) > k or sum(weight[i] for i in c) > 1 + WEIGHT_TOL:
                raise InternalError(f"assembled bin {c} is not a configuration")
        val = float(inst.value(i for c in cand for i in c))
        if val > best[0]:
            best[0], best[1] = val, [make_config(c) for c in cand]

    def walk(band, pos, used):
        # Either stop this band's prefix here, or give its next item to a bin.
        if band == len(bands):
            evaluate()
            return
        saved = band_counts[:]
        for b in range(m):
            band_counts[b] = 0
        walk(band + 1, 0, used)
        band_counts[:] = saved
        members = bands[band]
        if pos == len(members):
            return
        i = members[pos]
        for b in range(min(used + 1, m)):
            if len(bins[b]) < k and band_counts[b] < cap \
                    and loads[b] + weight[i] <= 1 + WEIGHT_TOL:
                bins[b].append(i)
                loads[b] += weight[i]
                band_counts[b] += 1
                walk(band, pos + 1, max(used, b + 1))
                band_counts[b] -= 1
                loads[b] -= weight[i]
                bins[b].pop()

    walk(0, 0, 0)
    return Solution(tuple(best[1]))


def asymptotic_threshold(eps_prime: float) -> float:
    try:
        return math.exp(math.exp(eps_prime ** -160)) + eps_prime ** -3
    except OverflowError:
        return math.inf


def choose_branch(inst: Instance, eps_prime: float, mode: str = "practical",
                  m_switch: int = M_SWITCH) -> str:
    if mode == "faithful":
        return "constant_bins" if inst.m < asymptotic_threshold(eps_prime) else "iterative"
    if mode != "practical":
        raise InputError(f"unknown mode {mode!r}")
    return "iterative" if inst.m >= m_switch else "constant_bins"


def dispatch(inst: Instance, eps_prime: float, mode: str = "practical", *,
             m_switch: int = M_SWITCH, budget: int = DEFAULT_BUDGET, seed: int = 0,
             info: Optional[dict] = None) -> Solution:
    """Pick an algorithm by bin count; never fails on a valid instance.

    ``info``, when given, receives the branch actually taken.
    """
    if not 0 < eps_prime < 1:
        raise InputError(f"eps_prime must lie in (0,1), got {eps_prime}")
    branch = choose_branch(inst, eps_prime, mode, m_switch)
    if branch == "iterative":
        from .rounding import RoundingParams, iterative_rounding
        sol, _ = iterative_rounding(inst, RoundingParams(eps_prime, seed))
    else:
        ls = local_search(inst)
        try:
            sol = constant_bins(inst, eps_prime, budget, ls=ls)
        except BudgetError:
            branch, sol = "local_search", ls
    if info is not None:
        info["branch"] = branch
    sol.validate(inst)
    return sol
