"""The configuration LP over a subset of items with a fixed bin budget.

``max v(x)`` subject to ``cover(x) <= 1``, every configuration drawn from the
allowed items, and ``||x|| = ell``.  The empty configuration absorbs unused
budget.  Two solvers: full enumeration for tiny item sets, and column
generation with a knapsack pricing oracle.
"""

from dataclasses import dataclass, field
from numbers import Real
from typing import Dict, FrozenSet, Iterable, List, Optional

import numpy as np

from . import knapsack
from .core import (EMPTY, WEIGHT_TOL, Configuration, FractionalSolution, Instance,
                   make_config)
from .errors import CapacityError, ConvergenceError, InputError, InternalError
from .simplex import DenseLp, Simplex, solve_vertex_lp

ENUM_CAP = 14
MAX_COLUMNS = 10000
CHECK_EVERY = 10
HEURISTIC_SEEDS = 0
PERTURB = 1e-7


@dataclass(frozen=True)
class LpProblem:
    instance: Instance
    allowed_items: FrozenSet[int]
    ell: Real

    def __post_init__(self):
        object.__setattr__(self, "allowed_items", frozenset(self.allowed_items))
        for i in self.allowed_items:
            if i not in self.instance:
                raise InputError(f"allowed item {i} not in instance")
        if not (isinstance(self.ell, Real) and self.ell > 0):
            raise InputError(f"ell must be positive, got {self.ell!r}")

    @classmethod
    def full(cls, inst: Instance, ell=None) -> "LpProblem":
        return cls(inst, frozenset(inst.ids), inst.m if ell is None else ell)


@dataclass
class LpSolution:
    fractional: FractionalSolution
    objective: float
    duals: Dict[int, float]
    budget_dual: float
    status: str  # optimal | approx | infeasible
    upper_bound: float
    eps: Optional[float] = None
    iterations: int = 0
    columns: List[Configuration] = field(default_factory=list, repr=False)


def check_lp_solution(lp: LpProblem, x: FractionalSolution, tol: float = 1e-9) -> None:
    allowed = lp.allowed_items
    for c, xc in x.items():
        if xc < 0:
            raise InternalError(f"negative weight on {c}")
        if not set(c) <= allowed:
            raise InternalError(f"configuration {c} uses items outside the allowed set")
        if len(c) > lp.instance.k or lp.instance.weight(c) > 1 + WEIGHT_TOL:
            raise InternalError(f"{c} is not a configuration")
    for i, y in x.cover().items():
        if y > 1 + tol:
            raise InternalError(f"cover of item {i} is {y}")
    if abs(x.size() - lp.ell) > tol:
        raise InternalError(f"size {x.size()} differs from budget {lp.ell}")


def enumerate_configurations(inst: Instance, ids: Iterable[int]) -> List[Configuration]:
    ids = sorted(ids)
    out = [EMPTY]
    w = {i: inst.item(i).weight for i in ids}

    def grow(start, cur, weight):
        for j in range(start, len(ids)):
            i = ids[j]
            nw = weight + w[i]
            if nw <= 1 + WEIGHT_TOL and len(cur) < inst.k:
                cur.append(i)
                out.append(tuple(cur))
                grow(j + 1, cur, nw)
                cur.pop()

    grow(0, [], 0)
    return out


def solve_exact_small(lp: LpProblem) -> LpSolution:
    """Optimum of the LP by listing every configuration of the allowed items."""
    inst = lp.instance
    items = sorted(lp.allowed_items)
    if len(items) > ENUM_CAP:
        raise CapacityError(f"{len(items)} allowed items exceed the enumeration cap of {ENUM_CAP}")
    configs = enumerate_configurations(inst, items)
    row = {i: r for r, i in enumerate(items)}
    n = len(configs)
    c = [float(inst.value(cf)) for cf in configs]
    A_ub = np.zeros((len(items), n))
    for j, cf in enumerate(configs):
        for i in cf:
            A_ub[row[i], j] = 1.0
    res = solve_vertex_lp(DenseLp(c=c, A_ub=A_ub, b_ub=np.ones(len(items)),
                                  A_eq=np.ones((1, n)), b_eq=[float(lp.ell)]))
    if res.status != "optimal":
        raise InternalError(f"configuration LP reported {res.status}")
    x = FractionalSolution([(cf, float(v)) for cf, v in zip(configs, res.x) if v > 1e-12])
    check_lp_solution(lp, x)
    duals = {i: float(res.duals_ub[row[i]]) for i in items}
    obj = float(res.objective)
    return LpSolution(fractional=x, objective=obj, duals=duals,
                      budget_dual=float(res.duals_eq[0]), status="optimal",
                      upper_bound=obj, columns=list(configs))


class _MasterSimplex(Simplex):
    """Simplex whose columns are 0/1 with few nonzeros: slacks, then configurations."""

    def __init__(self, A, b, c, basis):
        super().__init__(A, b, c, basis)
        self.budget_row = A.shape[0] - 1
        self._flat = np.zeros(0, dtype=np.int64)
        self._starts = []

    def add_configuration_columns(self, row_lists, cols, costs):
        for rows in row_lists:
            self._starts.append(self._flat.size)
            self._flat = np.concatenate([self._flat, np.asarray(rows, dtype=np.int64)])
        self.add_columns(cols, costs)

    def column_products(self, y):
        s = self.budget_row
        out = np.empty(self.ncols)
        out[:s] = y[:s]
        out[s] = y[s]
        nconf = self.ncols - s - 1
        if nconf:
            sums = np.zeros(nconf)
            starts = np.asarray(self._starts, dtype=np.int64)
            lens = np.diff(np.append(starts, self._flat.size))
            nonempty = lens > 0
            if self._flat.size:
                sums[nonempty] = np.add.reduceat(y[self._flat], starts[nonempty])
            out[s + 1:] = sums + y[s]
        return out


class _Master:
    """Restricted master problem: slack columns, then configuration columns."""

    def __init__(self, lp: LpProblem, columns: Iterable[Configuration]):
        inst = lp.instance
        self.lp = lp
        self.ids = sorted(lp.allowed_items)
        self.row = {i: r for r, i in enumerate(self.ids)}
        s = len(self.ids)
        self.s = s
        self.w = np.array([float(inst.item(i).weight) for i in self.ids])
        self.v = np.array([float(inst.item(i).value) for i in self.ids])
        self.k = inst.k
        A = np.eye(s + 1)  # item slacks, then the empty configuration
        cost = np.zeros(s + 1)
        self.configs: List[Configuration] = [EMPTY]
        self.index = {EMPTY: 0}
        # Shrinking each cover bound by a distinct tiny amount removes the heavy
        # degeneracy of integral starting points; the result stays feasible and the
        # dual bound does not depend on the right-hand side.
        b = 1.0 - PERTURB * (1.0 + np.random.default_rng(0).random(s + 1))
        b[s] = float(lp.ell)
        self.sx = _MasterSimplex(A, b, cost, list(range(s + 1)))
        self.add([(i,) for i in self.ids])
        self.add(columns)

    def add(self, configs: Iterable[Configuration]) -> int:
        fresh = []
        for c in configs:
            c = make_config(c)
            if c in self.index:
                continue
            if any(i not in self.row for i in c):
                continue
            if len(c) > self.k or self.w[[self.row[i] for i in c]].sum() > 1 + WEIGHT_TOL:
                continue
            self.index[c] = len(self.configs)
            self.configs.append(c)
            fresh.append(c)
        if fresh:
            cols = np.zeros((self.s + 1, len(fresh)))
            costs = np.zeros(len(fresh))
            row_lists = []
            for t, c in enumerate(fresh):
                rows = [self.row[i] for i in c]
                row_lists.append(rows)
                cols[rows, t] = 1.0
                costs[t] = self.v[rows].sum()
            cols[self.s, :] = 1.0
            self.sx.add_configuration_columns(row_lists, cols, costs)
        return len(fresh)

    def solve(self):
        status = self.sx.run()
        if status != "optimal":
            raise InternalError(f"restricted master is {status}")
        y = self.sx.duals()
        lam = np.maximum(y[:self.s], 0.0)
        return float(self.sx.objective()), lam, float(y[self.s])

    def solution(self) -> FractionalSolution:
        x = self.sx.primal()
        # the final basis usually stays feasible for the true right-hand side
        b = np.ones(self.s + 1)
        b[self.s] = float(self.lp.ell)
        exact_rhs = self.sx.Binv @ b
        if exact_rhs.min() >= -1e-12:
            x[self.sx.basis] = np.maximum(exact_rhs, 0.0)
        pairs = []
        for j in range(self.s, self.sx.ncols):
            if x[j] > 1e-12:
                pairs.append((self.configs[j - self.s], float(x[j])))
        return FractionalSolution(pairs)

    def greedy_packing(self, bins: int) -> List[Configuration]:
        """First-fit of items by value density into ``bins`` bins."""
        if bins <= 0 or self.s == 0:
            return []
        key = self.v / (self.w + 1.0 / self.k)
        order = np.lexsort((np.arange(self.s), -key))
        loads = [0.0] * bins
        packs: List[List[int]] = [[] for _ in range(bins)]
        open_bins = list(range(bins))
        for r in order:
            if self.v[r] <= 0:
                break
            for b in open_bins:
                if len(packs[b]) < self.k and loads[b] + self.w[r] <= 1 + WEIGHT_TOL:
                    packs[b].append(self.ids[r])
                    loads[b] += self.w[r]
                    break
            open_bins = [b for b in open_bins if len(packs[b]) < self.k and loads[b] < 1]
            if not open_bins:
                break
        return [make_config(p) for p in packs if p]

    def heuristic_columns(self, profit, seeds: int = 0) -> List[Configuration]:
        """Greedy single-bin packings under a few orderings.

        With ``seeds > 0`` also packs around each of the ``seeds`` most profitable
        items, which gives the master many diverse columns per round.
        """
        pos = np.nonzero(profit > 1e-12)[0]
        if pos.size == 0:
            return []
        w = self.w[pos]
        p = profit[pos]
        wmin = float(w.min())
        orders = [pos[np.lexsort((pos, -key))]
                  for key in (p / (w + 1.0 / self.k), p, p / np.maximum(w, 1e-9))]

        def fill(first, order):
            chosen = [first] if first is not None else []
            load = self.w[first] if first is not None else 0.0
            for r in order:
                if len(chosen) == self.k or load + wmin > 1 + WEIGHT_TOL:
                    break
                if r != first and load + self.w[r] <= 1 + WEIGHT_TOL:
                    chosen.append(r)
                    load += self.w[r]
            return make_config(self.ids[r] for r in chosen)

        out = [fill(None, order) for order in orders]
        for r in orders[1][:seeds]:
            out.append(fill(r, orders[0]))
        return out


def aggregate_bound(values, weights, ell: float, k: int) -> float:
    """Upper bound on the LP from pooling all bins into one big knapsack.

    For any theta, rho >= 0, ``sum((v - theta - rho*w)+) + ell*(k*theta + rho)`` is
    the dual value of duals ``lam_i = (v_i - theta - rho*w_i)+``, so it bounds the
    LP.  Minimized over rho exactly (weighted median) and over theta by ternary
    search on the convex outer function.
    """
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    if v.size == 0:
        return 0.0

    def at(theta):
        a = v - theta
        keep = a > 0
        a, ww = a[keep], w[keep]
        rho = 0.0
        if a.size:
            ratio = a / np.maximum(ww, 1e-300)
            order = np.argsort(-ratio, kind="stable")
            j = int(np.searchsorted(np.cumsum(ww[order]), ell))
            if j < a.size:
                rho = max(float(ratio[order[j]]), 0.0)
        return float(np.maximum(a - rho * ww, 0.0).sum()) + ell * (k * theta + rho)

    lo, hi = 0.0, float(v.max())
    best = min(at(lo), at(hi))
    for _ in range(60):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        g1, g2 = at(m1), at(m2)
        best = min(best, g1, g2)
        if g1 < g2:
            hi = m2
        else:
            lo = m1
    return best


def _profit_of(master: _Master, profit, c: Configuration) -> float:
    return float(sum(profit[master.row[i]] for i in c))


def solve_column_generation(lp: LpProblem, eps: float, max_columns: int = MAX_COLUMNS,
                            exact_cap: int = knapsack.EXACT_CAP,
                            initial_columns: Iterable[Configuration] = ()) -> LpSolution:
    """(1-eps)-approximate LP solution with a certified upper bound.

    With duals ``lam`` (item rows) and ``mu`` (budget row) and ``P`` an upper bound
    on the best pricing profit, ``sum(lam) + ell * max(mu, P)`` bounds the LP
    optimum.  The loop stops once the master value reaches (1-eps) of it.
    """
    if not (isinstance(eps, Real) and 0 < eps < 1):
        raise InputError(f"eps must lie in (0,1), got {eps!r}")
    master = _Master(lp, initial_columns)
    ell = float(lp.ell)
    master.add(master.greedy_packing(int(ell)))
    exact_pricing = len(master.ids) <= exact_cap
    price_eps = eps / 2
    best_bound = aggregate_bound(master.v, master.w, ell, lp.instance.k) * (1 + 1e-12) + 1e-12
    rounds = 0
    since_check = 0
    while True:
        rounds += 1
        obj, lam, mu = master.solve()
        if obj >= (1 - eps) * best_bound:
            status = "approx"
            break
        profit = np.maximum(master.v - lam, 0.0)
        added = 0
        if since_check < CHECK_EVERY:
            heur = [c for c in master.heuristic_columns(profit, seeds=HEURISTIC_SEEDS)
                    if _profit_of(master, profit, c) > mu + 1e-9]
            added = master.add(heur)
        if added:
            since_check += 1
        else:
            since_check = 0
            cands = tuple((master.ids[r], master.w[r], profit[r])
                          for r in np.nonzero(profit > 1e-12)[0])
            prob = knapsack.PricingProblem(cands, lp.instance.k)
            if exact_pricing:
                col = knapsack.solve_exact(prob, cap=max(exact_cap, len(cands)))
                p_col = _profit_of(master, profit, col)
                p_ub = p_col
            else:
                col = knapsack.solve_fptas(prob, price_eps)
                p_col = _profit_of(master, profit, col)
                p_ub = p_col / (1 - price_eps)
            bound = float(lam.sum()) + ell * max(mu, p_ub)
            best_bound = min(best_bound, bound)
            if p_col <= mu + 1e-9 and exact_pricing:
                status = "optimal"
                break
            if obj >= (1 - eps) * best_bound - 1e-12:
                status = "approx"
                break
            added = master.add([col]) if p_col > mu + 1e-9 else 0
            if not added:
                status = "approx"
                break
        if len(master.configs) > max_columns:
            x = master.solution()
            raise ConvergenceError(
                f"column generation exceeded {max_columns} columns",
                best=_package(lp, master, x, obj, lam, mu, "approx", best_bound, eps, rounds))
    x = master.solution()
    check_lp_solution(lp, x)
    obj = float(x.value(lp.instance))
    return _package(lp, master, x, obj, lam, mu, status, max(best_bound, obj), eps, rounds)


def _package(lp, master, x, obj, lam, mu, status, bound, eps, rounds) -> LpSolution:
    return LpSolution(
        fractional=x, objective=obj,
        duals={i: float(lam[r]) for r, i in enumerate(master.ids)},
        budget_dual=mu, status=status, upper_bound=float(bound), eps=eps,
        iterations=rounds, columns=list(master.configs))


def lp_value_bound(inst: Instance, eps: float = 0.01) -> float:
    """Certified upper bound on LP(I, m), hence on OPT."""
    if inst.n == 0:
        return 0.0
    return solve_column_generation(LpProblem.full(inst), eps).upper_bound
