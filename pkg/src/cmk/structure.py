"""Grouping, types and classes of a packed item set, and the fractional
solutions built from them.

Everything here works over exact rationals.  Float weights and cover values
are converted with a continued-fraction approximation (denominator at most
10^6) before use; ``Fraction`` and ``int`` inputs are taken as they are.

A context is built from an instance and a packing D_1..D_l of a set S.  The
adjusted weight of an item is w(i) + 1/k; items of S with adjusted weight at
least delta are large.  Large items are split into delta^-2 consecutive groups
of equal size (the last ones may be shorter), a configuration's type counts its
large items per group, and the small items of S are classed by the type of the
packing bin holding them.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import knapsack
from .core import Configuration, FractionalSolution, Instance, make_config
from .errors import CapacityError, InputError, InternalError, PreconditionError
from .simplex import DenseLp, solve_vertex_lp

DENOMINATOR_CAP = 10 ** 6
MAX_TYPES = 200_000

Type = Tuple[int, ...]
Rational = Fraction


def rational(x) -> Fraction:
    """Exact value of ``x``; floats go through a bounded continued fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool,)):
        raise InputError("booleans are not numbers here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise InputError(f"non-finite value {x}")
        return Fraction(float(x)).limit_denominator(DENOMINATOR_CAP)
    try:
        return Fraction(x)
    except (TypeError, ValueError) as exc:
        raise InputError(f"cannot read {x!r} as a rational") from exc


def rational_vector(y: Mapping) -> Dict[int, Fraction]:
    out = {}
    for i, v in y.items():
        q = rational(v)
        if q < 0 or q > 1:
            raise InputError(f"entry {i} of the cover vector is outside [0,1]: {v}")
        if q:
            out[int(i)] = q
    return out


def _parse_delta(delta) -> Fraction:
    d = rational(delta)
    if d <= 0 or d > Fraction(1, 2) or d.numerator != 1:
        raise InputError(f"delta must be 1/q for an integer q >= 2, got {delta}")
    return d


def _lcm_of_denominators(values: Iterable[Fraction]) -> int:
    n = 1
    for v in values:
        n = n * v.denominator // math.gcd(n, v.denominator)
    return n


@dataclass(frozen=True)
class StructureContext:
    inst: Instance
    delta: Fraction
    packing: Tuple[Configuration, ...]
    weights: Dict[int, Fraction] = field(repr=False)
    support: FrozenSet[int]  # S
    large: FrozenSet[int]  # L
    groups: Tuple[Tuple[int, ...], ...]  # G_1..G_{1/delta^2}, nonincreasing adjusted weight
    rounded: Tuple[Fraction, ...]  # least weight in each group, 0 if empty
    types: Tuple[Type, ...]  # every type of a configuration, lexicographic
    bin_types: Tuple[Type, ...]
    eta: Dict[Type, int]
    classes: Dict[Type, Tuple[int, ...]]  # nonincreasing weight, ties by id
    boundaries: Dict[Type, Tuple[int, ...]]  # h_0..h_{1/delta^2}
    degenerate: FrozenSet[Type]
    group_of: Dict[int, int] = field(repr=False)
    class_of: Dict[int, Type] = field(repr=False)

    @property
    def ell(self) -> int:
        return len(self.packing)

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def small(self) -> FrozenSet[int]:
        return self.support - self.large

    def adjusted(self, i: int) -> Fraction:
        return self.weights[i] + Fraction(1, self.inst.k)

    def adjusted_total(self, ids: Iterable[int]) -> Fraction:
        return sum((self.adjusted(i) for i in ids), Fraction(0))

    def weight(self, ids: Iterable[int]) -> Fraction:
        return sum((self.weights[i] for i in ids), Fraction(0))

    def is_configuration(self, ids: Sequence[int]) -> bool:
        return len(set(ids)) == len(ids) <= self.inst.k and self.weight(ids) <= 1

    def type_of(self, config: Iterable[int]) -> Type:
        counts = [0] * self.n_groups
        for i in config:
            j = self.group_of.get(i)
            if j is not None:
                counts[j] += 1
        return tuple(counts)

    def type_weight(self, p: Type) -> Fraction:
        return sum((c * w for c, w in zip(p, self.rounded)), Fraction(0))

    def subclasses(self, p: Type) -> Tuple[Tuple[int, ...], ...]:
        members = self.classes.get(p, ())
        h = self.boundaries.get(p)
        if h is None:
            return tuple(() for _ in range(self.n_groups))
        return tuple(members[h[j - 1]:h[j]] for j in range(1, len(h)))


def _enumerate_types(groups, weights, k) -> List[Type]:
    # lightest-p suffix sums per group: a count vector is a type iff the lightest
    # members it asks for fit in one bin
    light = []
    for g in groups:
        sums = [Fraction(0)]
        for i in reversed(g):
            sums.append(sums[-1] + weights[i])
        light.append(sums)
    out: List[Type] = []
    counts = [0] * len(groups)

    def dfs(j, used, load):
        if j == len(groups):
            out.append(tuple(counts))
            if len(out) > MAX_TYPES:
                raise CapacityError(f"more than {MAX_TYPES} types")
            return
        for p in range(min(len(groups[j]), k - used) + 1):
            if load + light[j][p] > 1:
                break
            counts[j] = p
            dfs(j + 1, used + p, load + light[j][p])
        counts[j] = 0

    dfs(0, 0, Fraction(0))
    return sorted(out)


def build_context(inst: Instance, packing: Sequence[Iterable[int]], delta) -> StructureContext:
    """Grouping, types, classes and subclasses for a packing of S = union of bins."""
    d = _parse_delta(delta)
    weights = {it.id: rational(it.weight) for it in inst.items}
    bins = []
    seen = set()
    for b, raw in enumerate(packing):
        ids = list(raw)
        for i in ids:
            if i not in inst:
                raise InputError(f"bin {b} holds unknown item {i}")
            if i in seen:
                raise InputError(f"item {i} is packed twice")
            seen.add(i)
        if len(ids) > inst.k or sum((weights[i] for i in ids), Fraction(0)) > 1:
            raise InputError(f"bin {b} is not a configuration")
        bins.append(make_config(ids))
    if not bins:
        raise InputError("the packing needs at least one bin")
    k = inst.k
    adj = {i: weights[i] + Fraction(1, k) for i in seen}
    large = sorted((i for i in seen if adj[i] >= d), key=lambda i: (-adj[i], i))
    g = int(1 / d) ** 2
    size = math.ceil(d * d * len(large))
    groups = tuple(tuple(large[j * size:(j + 1) * size]) if size else () for j in range(g))
    rounded = tuple(min((weights[i] for i in grp), default=Fraction(0)) for grp in groups)
    group_of = {i: j for j, grp in enumerate(groups) for i in grp}
    types = tuple(_enumerate_types(groups, weights, k))

    def type_of(c):
        counts = [0] * g
        for i in c:
            if i in group_of:
                counts[group_of[i]] += 1
        return tuple(counts)

    bin_types = tuple(type_of(c) for c in bins)
    eta: Dict[Type, int] = {}
    members: Dict[Type, List[int]] = {}
    for c, p in zip(bins, bin_types):
        eta[p] = eta.get(p, 0) + 1
        members.setdefault(p, []).extend(i for i in c if i not in group_of)
    classes = {p: tuple(sorted(ms, key=lambda i: (-weights[i], i))) for p, ms in sorted(members.items())}
    class_of = {i: p for p, ms in classes.items() for i in ms}
    ell = len(bins)
    cut = Fraction(ell) * d ** 3 / len(types)
    degenerate = set(p for p in types if p not in classes)
    boundaries = {}
    for p, ms in classes.items():
        total = sum((adj[i] for i in ms), Fraction(0))
        if total <= cut:
            degenerate.add(p)
        if not ms:
            continue
        h = [0]
        prefix, s = Fraction(0), 0
        for j in range(1, g + 1):
            target = j * d * d * total
            while prefix < target:
                prefix += adj[ms[s]]
                s += 1
            h.append(s)
        boundaries[p] = tuple(h)
    return StructureContext(
        inst=inst, delta=d, packing=tuple(bins), weights=weights, support=frozenset(seen),
        large=frozenset(large), groups=groups, rounded=rounded, types=types,
        bin_types=bin_types, eta=dict(sorted(eta.items())), classes=classes,
        boundaries=boundaries, degenerate=frozenset(degenerate), group_of=group_of,
        class_of=class_of)


@dataclass(frozen=True)
class StructureVector:
    entries: Dict[int, Fraction]
    tol: Fraction
    label: str = ""

    def dot(self, y: Mapping[int, Fraction]) -> Fraction:
        return sum((u * y.get(i, 0) for i, u in self.entries.items()), Fraction(0))

    def mass(self) -> Fraction:
        return sum(self.entries.values(), Fraction(0))


def tolerance(inst: Instance, u: Mapping[int, object]) -> Fraction:
    """Largest total of ``u`` collected by one configuration, computed exactly."""
    cands = []
    for i, val in sorted(u.items()):
        q = rational(val)
        if q < 0:
            raise InputError(f"negative entry {val} for item {i}")
        if q > 0:
            cands.append((i, rational(inst.item(i).weight), q))
    if not cands:
        return Fraction(0)
    prob = knapsack.PricingProblem(tuple(cands), inst.k)
    best = knapsack.solve_exact(prob, cap=max(knapsack.EXACT_CAP, len(cands)))
    return Fraction(prob.profit(best))


def build_structure_vectors(ctx: StructureContext) -> List[StructureVector]:
    """Per non-degenerate type, the indicator and the weight vector of each
    subclass; per group, its indicator."""
    out = []
    for p in ctx.types:
        if p in ctx.degenerate or p not in ctx.classes:
            continue
        for j, h in enumerate(ctx.subclasses(p), start=1):
            ind = {i: Fraction(1) for i in h}
            wt = {i: ctx.weights[i] for i in h}
            out.append(StructureVector(ind, tolerance(ctx.inst, ind), f"count{p}:{j}"))
            out.append(StructureVector(wt, tolerance(ctx.inst, wt), f"weight{p}:{j}"))
    for j, grp in enumerate(ctx.groups, start=1):
        ind = {i: Fraction(1) for i in grp}
        out.append(StructureVector(ind, tolerance(ctx.inst, ind), f"group:{j}"))
    return out


def check_structure_inequalities(ctx: StructureContext, vectors: Sequence[StructureVector],
                                 y: Mapping, alpha, t) -> bool:
    """True iff u.y <= alpha * u.1_S + t * tol(u) for every vector u."""
    yq = rational_vector(y)
    a, tq = rational(alpha), rational(t)
    for u in vectors:
        on_s = sum((v for i, v in u.entries.items() if i in ctx.support), Fraction(0))
        if u.dot(yq) > a * on_s + tq * u.tol:
            return False
    return True


def least_slack(ctx: StructureContext, vectors: Sequence[StructureVector], y: Mapping,
                alpha) -> Fraction:
    """Smallest t >= 0 for which the structure inequalities hold, or -1 if none does."""
    yq = rational_vector(y)
    a = rational(alpha)
    t = Fraction(0)
    for u in vectors:
        on_s = sum((v for i, v in u.entries.items() if i in ctx.support), Fraction(0))
        excess = u.dot(yq) - a * on_s
        if excess <= 0:
            continue
        if u.tol == 0:
            return Fraction(-1)
        t = max(t, excess / u.tol)
    return t


def item_per_bin(y: Mapping) -> FractionalSolution:
    """One singleton configuration per item, weighted by its cover."""
    yq = rational_vector(y)
    return FractionalSolution({(i,): v for i, v in sorted(yq.items())})


def fractional_first_fit(inst: Instance, y: Mapping, delta=Fraction(1, 2)) -> FractionalSolution:
    """Cover ``y`` exactly with about 2 * sum y_i * (w_i + 1/k) + 1 configurations.

    With N the common denominator of ``y``, each item is added to N * y_i of
    the configurations built so far that can still take it, opening new
    singletons when too few can.  Every configuration then has weight N^-1.
    All items need adjusted weight below ``delta``.
    """
    d = _parse_delta(delta)
    yq = rational_vector(y)
    k = inst.k
    w = {}
    for i in yq:
        if i not in inst:
            raise InputError(f"unknown item {i}")
        w[i] = rational(inst.item(i).weight)
        if w[i] + Fraction(1, k) >= d:
            raise InputError(f"item {i} has adjusted weight at least {d}")
    n = _lcm_of_denominators(yq.values())
    # identical configurations are kept as one entry with a multiplicity
    pool: Dict[Configuration, List] = {}
    for i in sorted(yq):
        need = int(yq[i] * n)
        grown: Dict[Configuration, int] = {}
        for c in sorted(pool):
            if need == 0:
                break
            load, count = pool[c]
            if len(c) + 1 > k or load + w[i] > 1:
                continue
            take = min(count, need)
            need -= take
            if take == count:
                del pool[c]
            else:
                pool[c][1] -= take
            key = make_config(c + (i,))
            grown[key] = grown.get(key, 0) + take
        if need:
            grown[(i,)] = grown.get((i,), 0) + need
        for key, cnt in grown.items():
            if key in pool:
                pool[key][1] += cnt
            else:
                pool[key] = [sum((w[j] for j in key), Fraction(0)), cnt]
    return FractionalSolution({c: Fraction(cnt, n) for c, (_, cnt) in pool.items()})


def _cover_exact(x: FractionalSolution) -> Dict[int, Fraction]:
    return {i: v for i, v in x.cover().items() if v}


def scaling_violations(ctx: StructureContext, y: Mapping[int, Fraction], alpha) -> List[str]:
    """Caps an alpha-scaled vector must respect that ``y`` breaks."""
    a = rational(alpha)
    bad = [f"item {i} outside S" for i in sorted(y) if i not in ctx.support]
    for j, grp in enumerate(ctx.groups, start=1):
        if sum((y.get(i, 0) for i in grp), Fraction(0)) > a * len(grp):
            bad.append(f"group {j} count cap")
    for p, ms in ctx.classes.items():
        if sum((y.get(i, 0) for i in ms), Fraction(0)) > a * len(ms):
            bad.append(f"class {p} count cap")
        if sum((y.get(i, 0) * ctx.weights[i] for i in ms), Fraction(0)) > a * ctx.weight(ms):
            bad.append(f"class {p} weight cap")
    return bad


def minimal_scaling(ctx: StructureContext, y: Mapping[int, Fraction]) -> Fraction:
    """Least alpha for which ``y`` (supported on S) is alpha-scaled."""
    a = Fraction(0)
    for grp in ctx.groups:
        if grp:
            a = max(a, sum((y.get(i, 0) for i in grp), Fraction(0)) / len(grp))
    for ms in ctx.classes.values():
        if ms:
            a = max(a, sum((y.get(i, 0) for i in ms), Fraction(0)) / len(ms))
            wk = ctx.weight(ms)
            if wk:
                a = max(a, sum((y.get(i, 0) * ctx.weights[i] for i in ms), Fraction(0)) / wk)
    return a


def _exp_bound(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _assign_block(ctx, members, slots, sets, yq, n) -> Dict[Tuple[int, int], Fraction]:
    """Vertex optimum of the assignment LP restricted to one type's slots."""
    k = ctx.inst.k
    pairs = [(i, b) for i in members for b in slots]
    col = {pr: c for c, pr in enumerate(pairs)}
    zero = [Fraction(0)] * len(pairs)
    rows, rhs = [], []
    for i in members:
        r = zero[:]
        for b in slots:
            r[col[(i, b)]] = Fraction(1)
        rows.append(r)
        rhs.append(yq[i] * n)
    for b in slots:
        rc, rw = zero[:], zero[:]
        for i in members:
            rc[col[(i, b)]] = Fraction(1)
            rw[col[(i, b)]] = ctx.weights[i]
        rows += [rc, rw]
        rhs += [Fraction(k - len(sets[b])), 1 - ctx.weight(sets[b])]
    # a float solve finds the optimal basis cheaply; the exact solve restarts
    # from it and only pivots further if rounding misled the float run
    approx = solve_vertex_lp(DenseLp(c=[1.0] * len(pairs), A_ub=np.array(rows, dtype=float),
                                     b_ub=np.array(rhs, dtype=float), upper=[1.0] * len(pairs)))
    res = solve_vertex_lp(DenseLp(c=[Fraction(1)] * len(pairs), A_ub=rows, b_ub=rhs,
                                  upper=[Fraction(1)] * len(pairs)),
                          basis=approx.basis if approx.status == "optimal" else None)
    target = n * sum((yq[i] for i in members), Fraction(0))
    if res.status != "optimal" or res.objective != target:
        raise InternalError(f"assignment LP reached {res.objective}, expected {target}")
    z = {pr: res.x[c] for pr, c in col.items() if res.x[c]}
    for i in members:
        if sum((z.get((i, b), 0) for b in slots), Fraction(0)) != yq[i] * n:
            raise InternalError(f"item {i} is not fully assigned")
    return z


def build_weak_structure_solution(ctx: StructureContext, y: Mapping, alpha,
                                  report: Optional[dict] = None) -> FractionalSolution:
    """Fractional solution covering an alpha-scaled ``y`` exactly with about
    alpha * l configurations.

    Large items outside the first group are shifted into placeholder slots one
    group up; small items are then assigned to the slots by a vertex optimum of
    an assignment LP.  Integral assignments become configurations, the
    fractional rest goes through ``fractional_first_fit`` and the first group
    plus unplaceable large items through ``item_per_bin``.  ``report``, when
    given, receives the sizes used along the way.
    """
    yq = rational_vector(y)
    a = rational(alpha)
    if not 0 <= a <= 1:
        raise InputError(f"alpha must lie in [0,1], got {alpha}")
    bad = scaling_violations(ctx, yq, a)
    if bad:
        raise PreconditionError(f"y is not {a}-scaled: " + "; ".join(bad))
    d = ctx.delta
    k = ctx.inst.k
    n = _lcm_of_denominators(list(yq.values()) + [a])

    # placeholder slots: one block per type that occurs in the packing
    slot_type: List[Type] = []
    for p, cnt in ctx.eta.items():
        slot_type.extend([p] * int(a * n * cnt + n))
    m_slots = len(slot_type)
    sets: List[List[int]] = [[] for _ in range(m_slots)]
    rejected: List[int] = []
    for j in range(1, ctx.n_groups):
        used = [0] * m_slots
        for i in ctx.groups[j]:
            need = int(yq.get(i, 0) * n)
            if need == 0:
                continue
            free = [b for b in range(m_slots) if used[b] < slot_type[b][j - 1]]
            if len(free) < need:
                rejected.append(i)
                continue
            for b in free[:need]:
                sets[b].append(i)
                used[b] += 1
    for j in range(1, ctx.n_groups):
        if sum(1 for i in rejected if ctx.group_of[i] == j) > 2 / d:
            raise InternalError(f"more than 2/delta rejected items in group {j + 1}")
    if len(rejected) > 2 / d ** 3:
        raise InternalError("too many rejected large items")
    for b, s in enumerate(sets):
        p = slot_type[b]
        if len(s) > sum(p) or ctx.weight(s) > ctx.type_weight(p):
            raise InternalError(f"slot {b} exceeds its type")

    # assignment of small items to slots whose type is the item's class; the
    # LP splits into one independent block per type
    small = sorted(i for i in yq if i not in ctx.large)
    z: Dict[Tuple[int, int], Fraction] = {}
    for p in ctx.eta:
        members = [i for i in small if ctx.class_of[i] == p]
        if members:
            slots = [b for b in range(m_slots) if slot_type[b] == p]
            z.update(_assign_block(ctx, members, slots, sets, yq, n))
    frac_mass = sum((v for v in z.values() if v < 1), Fraction(0))
    if frac_mass > 2 * m_slots:
        raise InternalError(f"fractional mass {frac_mass} exceeds 2M = {2 * m_slots}")

    full = [list(s) for s in sets]
    integral: Dict[int, int] = {}
    for (i, b), v in z.items():
        if v == 1:
            full[b].append(i)
            integral[i] = integral.get(i, 0) + 1
    counts: Dict[Configuration, int] = {}
    for s in full:
        key = make_config(s)
        if not ctx.is_configuration(key):
            raise InternalError(f"slot {key} is not a configuration")
        if key:  # unused slots collect nothing
            counts[key] = counts.get(key, 0) + 1
    core = FractionalSolution({c: Fraction(cnt, n) for c, cnt in counts.items()})
    rest = {i: yq[i] - Fraction(integral.get(i, 0), n) for i in small}
    first_fit = fractional_first_fit(ctx.inst, {i: v for i, v in rest.items() if v}, d)
    leftovers = set(ctx.groups[0]) | set(rejected)
    singles = item_per_bin({i: yq[i] for i in yq if i in leftovers})
    x = core + first_fit + singles
    if _cover_exact(x) != yq:
        raise InternalError("weak-structure solution does not cover y exactly")
    bound = float(a) * (1 + 10 * float(d)) * ctx.ell + _exp_bound(float(d) ** -4)
    if float(x.size()) > bound:
        raise InternalError(f"size {x.size()} exceeds {bound}")
    if report is not None:
        report.update({"N": n, "M": m_slots, "rejected": len(rejected),
                       "fractional_mass": str(frac_mass), "size": str(x.size()),
                       "size_bound": bound, "alpha": str(a)})
    return x


def build_structure_solution(ctx: StructureContext, y: Mapping, alpha, t,
                             report: Optional[dict] = None) -> FractionalSolution:
    """Fractional solution covering ``y`` exactly, split by item category.

    Degenerate classes and the outer subclasses of the other classes go through
    ``fractional_first_fit``; groups with at most delta^4 * l items through
    ``item_per_bin``; the rest through ``build_weak_structure_solution`` at the
    least scaling it satisfies.
    """
    yq = rational_vector(y)
    for i in yq:
        if i not in ctx.support:
            raise InputError(f"item {i} lies outside the packed set")
    d = ctx.delta
    ell = ctx.ell
    degen = {i for p in ctx.degenerate for i in ctx.classes.get(p, ())}
    outer = set()
    for p in ctx.classes:
        if p in ctx.degenerate:
            continue
        subs = ctx.subclasses(p)
        outer.update(subs[0])
        outer.update(subs[-1])
    thin = {i for grp in ctx.groups if len(grp) <= d ** 4 * ell for i in grp}
    part_d = {i: v for i, v in yq.items() if i in degen}
    part_q = {i: v for i, v in yq.items() if i in outer}
    part_u = {i: v for i, v in yq.items() if i in thin}
    rest = {i: v for i, v in yq.items() if i not in degen and i not in outer and i not in thin}
    n = _lcm_of_denominators(rest.values())
    a_min = minimal_scaling(ctx, rest)
    a_star = Fraction(math.ceil(a_min * n), n)
    weak_report: dict = {}
    x = (fractional_first_fit(ctx.inst, part_d, d) + fractional_first_fit(ctx.inst, part_q, d)
         + item_per_bin(part_u)
         + build_weak_structure_solution(ctx, rest, a_star, weak_report))
    if _cover_exact(x) != yq:
        raise InternalError("structure solution does not cover y exactly")
    a, tq = rational(alpha), rational(t)
    a_claim = a + 2 * d ** -6 * len(ctx.types) * tq / ell
    bound = float(a) * ell + 20 * float(d) * ell + (float(tq) + 1) * _exp_bound(float(d) ** -5)
    if report is not None:
        report.update({"degenerate_items": len(part_d), "outer_items": len(part_q),
                       "thin_group_items": len(part_u), "core_items": len(rest),
                       "alpha_used": str(a_star), "alpha_claimed": str(a_claim),
                       "size": str(x.size()), "size_bound": bound,
                       "within_bound": float(x.size()) <= bound, "weak": weak_report})
    return x


def check_counting_facts(ctx: StructureContext, configs: Sequence[Iterable[int]] = (),
                 vectors: Optional[Sequence[StructureVector]] = None) -> Dict[str, bool]:
    """Evaluate the counting facts about a context.

    ``configs`` are extra configurations of the instance used for the per-
    configuration facts; the packing bins are always included.
    """
    d = ctx.delta
    k = ctx.inst.k
    checks: Dict[str, bool] = {}
    sizes = [len(g) for g in ctx.groups]
    checks["groups_size"] = all(a >= b for a, b in zip(sizes, sizes[1:])) and \
        sizes[0] == math.ceil(d * d * len(ctx.large))
    checks["group_order"] = all(
        ctx.adjusted(a) >= ctx.adjusted(b)
        for a, b in zip([i for g in ctx.groups for i in g], [i for g in ctx.groups for i in g][1:]))
    checks["eta_to_groups"] = all(
        sum(cnt * p[j] for p, cnt in ctx.eta.items()) == len(ctx.groups[j])
        for j in range(ctx.n_groups))
    checks["num_types"] = len(ctx.types) <= (1 + 2 / d) ** (d ** -2)
    checks["bin_types_listed"] = all(p in set(ctx.types) for p in ctx.bin_types)
    pool = [make_config(c) for c in ctx.packing] + [make_config(c) for c in configs]
    type_weight = small_items = in_conf = adj2 = True
    for c in pool:
        if not ctx.is_configuration(c):
            raise InputError(f"{c} is not a configuration")
        p = ctx.type_of(c)
        big = [i for i in c if i in ctx.large]
        rest = [i for i in c if i not in ctx.large]
        type_weight &= ctx.weight(big) >= ctx.type_weight(p)
        small_items &= ctx.weight(rest) <= 1 - ctx.type_weight(p) and len(rest) <= k - sum(p)
        in_conf &= len(big) <= 2 / d
        adj2 &= ctx.adjusted_total(c) <= 2
    checks["type_weight"] = type_weight
    checks["small_items"] = small_items
    checks["large_items_in_conf"] = in_conf
    checks["config_adjusted_weight"] = adj2
    cw = True
    for p, ms in ctx.classes.items():
        cw &= ctx.weight(ms) <= ctx.eta[p] * (1 - ctx.type_weight(p))
        cw &= len(ms) <= ctx.eta[p] * (k - sum(p))
    checks["class_weight_and_card"] = cw
    partition = sorted(i for ms in ctx.classes.values() for i in ms)
    checks["classes_partition_small"] = partition == sorted(ctx.small)
    sub = True
    for p in ctx.classes:
        if p in ctx.degenerate:
            continue
        total = ctx.adjusted_total(ctx.classes[p])
        for h in ctx.subclasses(p):
            wh = ctx.adjusted_total(h)
            sub &= d * d * total - d <= wh <= d * d * total + d
    checks["adjusted_subclass_weight"] = sub
    if vectors is None:
        vectors = build_structure_vectors(ctx)
    nonde = sum(1 for p in ctx.types if p not in ctx.degenerate)
    checks["structure_size"] = len(vectors) <= 2 * len(ctx.types) * d ** -2 + d ** -2 and \
        len(vectors) == 2 * nonde * ctx.n_groups + ctx.n_groups
    return checks


def random_packed_instance(rng: np.random.Generator, bins: int, k: int, delta=Fraction(1, 2),
                           extra: int = 0, denominator: int = 60,
                           large_share: float = 0.35) -> Tuple[Instance, List[Configuration]]:
    """Instance with rational weights together with a packing of most items.

    Each bin receives up to two large items and then small items while they
    fit; ``extra`` unpacked items are appended.
    """
    from .core import Item
    d = _parse_delta(delta)
    cut = d - Fraction(1, k)  # weights at or above this are large
    items: List[Item] = []
    packing: List[Configuration] = []

    def draw_weight(lo: Fraction, hi: Fraction) -> Fraction:
        a = math.ceil(lo * denominator)
        b = math.floor(hi * denominator)
        if a > b:
            return None
        return Fraction(int(rng.integers(a, b + 1)), denominator)

    for _ in range(bins):
        cfg, load = [], Fraction(0)
        want = int(rng.integers(0, 3)) if rng.random() < large_share * 2 else 0
        for _ in range(want):
            w = draw_weight(max(cut, Fraction(0)), 1 - load)
            if w is None or len(cfg) >= k:
                break
            items.append(Item(len(items), w, Fraction(int(rng.integers(1, 100)), 100)))
            cfg.append(items[-1].id)
            load += w
        while len(cfg) < k:
            hi = min(cut - Fraction(1, denominator), 1 - load)
            w = draw_weight(Fraction(0), hi)
            if w is None or rng.random() < 0.15:
                break
            items.append(Item(len(items), w, Fraction(int(rng.integers(1, 100)), 100)))
            cfg.append(items[-1].id)
            load += w
        packing.append(tuple(cfg))
    for _ in range(extra):
        w = Fraction(int(rng.integers(0, denominator + 1)), denominator)
        items.append(Item(len(items), w, Fraction(int(rng.integers(1, 100)), 100)))
    return Instance(tuple(items), bins, k), packing


def random_configurations(ctx: StructureContext, rng: np.random.Generator,
                          count: int) -> List[Configuration]:
    ids = sorted(ctx.inst.ids)
    out = []
    for _ in range(count):
        order = rng.permutation(len(ids))
        cfg, load = [], Fraction(0)
        for t in order:
            i = ids[int(t)]
            if len(cfg) < ctx.inst.k and load + ctx.weights[i] <= 1 and rng.random() < 0.6:
                cfg.append(i)
                load += ctx.weights[i]
        out.append(make_config(cfg))
    return out


def random_cover(rng: np.random.Generator, ids: Iterable[int], cap=Fraction(1),
                 denominators=(1, 2, 4)) -> Dict[int, Fraction]:
    """Random rational vector with entries in [0, cap]."""
    cap = rational(cap)
    out = {}
    for i in sorted(ids):
        den = int(rng.choice(denominators))
        v = cap * Fraction(int(rng.integers(0, den + 1)), den)
        if v:
            out[i] = v
    return out


def verify(delta, seed: int, bins: int = 4, k: int = 6, samples: int = 5) -> dict:
    """Build a random context and run every check on it; returns a JSON-ready certificate."""
    d = _parse_delta(delta)
    rng = np.random.default_rng(seed)
    inst, packing = random_packed_instance(rng, bins, k, d, extra=2)
    ctx = build_context(inst, packing, d)
    vectors = build_structure_vectors(ctx)
    checks = check_counting_facts(ctx, random_configurations(ctx, rng, 20), vectors)
    small = sorted(ctx.small)
    ok_ff = ok_ipb = ok_weak = ok_full = True
    sizes = []
    for _ in range(samples):
        y = random_cover(rng, [i for i in small if ctx.adjusted(i) < d])
        x = fractional_first_fit(inst, y, d)
        bound = 2 * sum((v * ctx.adjusted(i) for i, v in y.items()), Fraction(0)) + 1
        ok_ff &= _cover_exact(x) == y and x.size() <= bound
        y_all = random_cover(rng, ctx.support)
        x = item_per_bin(y_all)
        ok_ipb &= _cover_exact(x) == y_all and x.size() == sum(y_all.values(), Fraction(0))
        alpha = Fraction(int(rng.integers(1, 5)), 4)
        y_scaled = random_cover(rng, ctx.support, alpha)
        weak: dict = {}
        x = build_weak_structure_solution(ctx, y_scaled, alpha, weak)
        ok_weak &= _cover_exact(x) == y_scaled
        sizes.append(weak)
        t = least_slack(ctx, vectors, y_all, alpha)
        if t >= 0:
            ok_full &= check_structure_inequalities(ctx, vectors, y_all, alpha, t)
            x = build_structure_solution(ctx, y_all, alpha, t)
            ok_full &= _cover_exact(x) == y_all
    checks["fractional_first_fit"] = ok_ff
    checks["item_per_bin"] = ok_ipb
    checks["weak_structure_cover"] = ok_weak
    checks["structure_cover"] = ok_full
    return {
        "delta": str(d), "seed": seed, "digest": inst.digest(),
        "counts": {"items": inst.n, "bins": ctx.ell, "large": len(ctx.large),
                   "small": len(ctx.small), "groups": ctx.n_groups, "types": len(ctx.types),
                   "realized_types": len(ctx.eta), "degenerate": len(ctx.degenerate),
                   "vectors": len(vectors)},
        "bounds": {"types": float((1 + 2 / d) ** (d ** -2)),
                   "vectors": float(2 * len(ctx.types) * d ** -2 + d ** -2)},
        "weak_runs": sizes,
        "checks": checks,
        "passed": all(checks.values()),
    }
