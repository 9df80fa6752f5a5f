"""Single runs with reports, and suites of runs with aggregate statistics."""

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Mapping, Optional, Sequence

from . import constant_bins as cb
from .config_lp import LpProblem, LpSolution, solve_column_generation
from .core import Instance, Solution
from .errors import CmkError, InputError, InternalError
from .exact import OracleLimits, solve_exact_cmk
from .generators import GeneratorSpec, generate
from .rounding import RoundingParams, check_bookkeeping, iterative_rounding, oneshot_rounding

ALGORITHMS = ("iterative", "oneshot", "constant-bins", "local-search", "exact", "dispatch")
BOUND_EPS = 0.01
RATIO_SLACK = 1e-6


def bound_lp(inst: Instance) -> LpSolution:
    return solve_column_generation(LpProblem.full(inst), BOUND_EPS)


def run(inst: Instance, algo: str, eps: float = 0.1, seed: int = 0, mode: str = "practical",
        budget: int = cb.DEFAULT_BUDGET, bound: Optional[LpSolution] = None,
        initial_lp: Optional[LpSolution] = None) -> dict:
    """Run one algorithm and report on it.

    ``bound`` and ``initial_lp`` let callers share LP solves between runs on the
    same instance: the first is LP(I, m) at the reporting accuracy, the second
    the rounding algorithms' own first LP at ``eps``.
    """
    if algo not in ALGORITHMS:
        raise InputError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")
    params = {"eps": eps, "seed": seed, "mode": mode, "budget": budget}
    trace = None
    extra = {}
    start = time.perf_counter()
    if algo in ("iterative", "oneshot"):
        rp = RoundingParams(eps, seed, mode=mode)
        fn = iterative_rounding if algo == "iterative" else oneshot_rounding
        sol, records = fn(inst, rp, initial_lp=initial_lp)
        if algo == "iterative":
            check_bookkeeping(inst, sol, records)
        trace = [r.to_dict() for r in records]
    elif algo == "constant-bins":
        sol = cb.constant_bins(inst, eps, budget)
    elif algo == "local-search":
        sol = cb.local_search(inst)
    elif algo == "exact":
        sol, _ = solve_exact_cmk(inst, OracleLimits())
    else:
        info: dict = {}
        sol = cb.dispatch(inst, eps, mode, budget=budget, seed=seed, info=info)
        extra["branch"] = info["branch"]
    wall = time.perf_counter() - start

    sol.validate(inst)
    text = json.dumps(sol.to_dict(), sort_keys=True)
    Solution.from_dict(json.loads(text)).validate(inst)
    value = float(sol.value(inst))
    if bound is None:
        bound = bound_lp(inst) if inst.n else None
    upper = float(bound.upper_bound) if bound is not None else 0.0
    ratio = value / upper if upper > 0 else 1.0
    if ratio > 1 + RATIO_SLACK:
        raise InternalError(f"{algo} reached {value}, above the LP bound {upper}")
    report = {
        "digest": inst.digest(), "algorithm": algo, "params": params, "value": value,
        "lp_upper_bound": upper, "ratio": ratio, "wall_time": wall,
        "trace": trace, "solution": sol.to_dict(),
    }
    report.update(extra)
    return report


def _seeds(suite: Mapping) -> List[int]:
    seeds = suite.get("seeds", [0])
    if isinstance(seeds, int):
        seeds = list(range(seeds))
    return [int(s) for s in seeds]


def _run_instance(spec_dict: dict, algos: Sequence[str], seeds: Sequence[int],
                  options: dict) -> List[dict]:
    """Every (algorithm, seed) cell on one generated instance."""
    spec = GeneratorSpec.from_dict(spec_dict)
    inst = generate(spec)
    eps = options.get("eps", 0.1)
    rows = []
    try:
        bound = bound_lp(inst) if inst.n else None
    except CmkError as exc:
        return [_failed(inst, spec, a, s, exc) for a in algos for s in seeds]
    first = None
    if any(a in ("iterative", "oneshot") for a in algos) and inst.n:
        try:
            first = solve_column_generation(LpProblem.full(inst), eps)
        except CmkError:
            first = None
    for algo in algos:
        for seed in seeds:
            try:
                rep = run(inst, algo, eps, seed, options.get("mode", "practical"),
                          options.get("budget", cb.DEFAULT_BUDGET), bound=bound,
                          initial_lp=first if algo in ("iterative", "oneshot") else None)
            except CmkError as exc:
                rows.append(_failed(inst, spec, algo, seed, exc))
                continue
            rows.append({"family": spec.family, "n": spec.n, "m": spec.m, "k": spec.k,
                         "instance_seed": spec.seed, "digest": rep["digest"],
                         "algorithm": algo, "seed": seed, "value": rep["value"],
                         "lp_upper_bound": rep["lp_upper_bound"], "ratio": rep["ratio"],
                         "wall_time": rep["wall_time"], "error": ""})
    return rows


def _failed(inst, spec, algo, seed, exc) -> dict:
    return {"family": spec.family, "n": spec.n, "m": spec.m, "k": spec.k,
            "instance_seed": spec.seed, "digest": inst.digest(), "algorithm": algo,
            "seed": seed, "value": None, "lp_upper_bound": None, "ratio": None,
            "wall_time": None, "error": f"{type(exc).__name__}: {exc}"}


def _stats(values: Sequence[float]) -> dict:
    vals = sorted(values)
    if not vals:
        return {"count": 0, "mean": None, "std": None}
    mean = math.fsum(vals) / len(vals)
    var = math.fsum((v - mean) ** 2 for v in vals) / len(vals)
    return {"count": len(vals), "mean": mean, "std": math.sqrt(var)}


def aggregate(rows: Sequence[Mapping]) -> dict:
    """Mean and standard deviation of ratios per algorithm and per
    (instance, algorithm) cell; independent of row order."""
    by_algo: Dict[str, List[float]] = {}
    by_cell: Dict[tuple, List[float]] = {}
    failures: Dict[str, int] = {}
    for r in rows:
        algo = r["algorithm"]
        if r.get("error"):
            failures[algo] = failures.get(algo, 0) + 1
            by_algo.setdefault(algo, [])
            continue
        by_algo.setdefault(algo, []).append(r["ratio"])
        by_cell.setdefault((r["digest"], algo), []).append(r["ratio"])
    algos = {a: dict(_stats(v), failures=failures.get(a, 0)) for a, v in sorted(by_algo.items())}
    cells = [dict(_stats(v), digest=d, algorithm=a) for (d, a), v in sorted(by_cell.items())]
    return {"algorithms": algos, "cells": cells}


def bench(suite: Mapping, out_dir: Optional[str] = None, workers: Optional[int] = None) -> dict:
    """Run the cross product of a suite.

    ``suite`` holds ``instances`` (generator specs), ``algorithms``, ``seeds``
    (a list or a count) and optionally ``eps``, ``mode``, ``budget`` and
    ``workers``.  Writes ``runs.csv`` and ``aggregate.json`` when ``out_dir``
    is given.
    """
    instances = list(suite.get("instances", []))
    algos = list(suite.get("algorithms", []))
    for a in algos:
        if a not in ALGORITHMS:
            raise InputError(f"unknown algorithm {a!r}")
    for spec in instances:
        GeneratorSpec.from_dict(spec)
    seeds = _seeds(suite)
    options = {k: suite[k] for k in ("eps", "mode", "budget") if k in suite}
    workers = workers or int(suite.get("workers", 1))
    if workers > 1 and len(instances) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_instance, instances, [algos] * len(instances),
                                  [seeds] * len(instances), [options] * len(instances)))
    else:
        parts = [_run_instance(spec, algos, seeds, options) for spec in instances]
    rows = sorted((r for part in parts for r in part),
                  key=lambda r: (r["digest"], r["algorithm"], r["seed"]))
    result = {"suite": {"instances": len(instances), "algorithms": algos, "seeds": len(seeds),
                        **options},
              "aggregate": aggregate(rows), "rows": rows}
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        fields = ["family", "n", "m", "k", "instance_seed", "digest", "algorithm", "seed",
                  "value", "lp_upper_bound", "ratio", "wall_time", "error"]
        with open(os.path.join(out_dir, "runs.csv"), "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            writer.writerows(rows)
        with open(os.path.join(out_dir, "aggregate.json"), "w", encoding="utf-8") as fh:
            json.dump({"suite": result["suite"], "aggregate": result["aggregate"]}, fh,
                      indent=2, sort_keys=True)
    return result
