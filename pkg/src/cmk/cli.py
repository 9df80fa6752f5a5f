"""Command-line entry point ``cmk``."""

import argparse
import json
import sys
from typing import Optional, Sequence

from . import bench as bench_mod
from . import constant_bins as cb
from .config_lp import LpProblem, solve_column_generation
from .core import Instance, dumps
from .errors import BudgetError, CapacityError, CmkError, InputError
from .generators import FAMILIES, GeneratorSpec, generate

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


def _read_instance(path: str) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            return Instance.from_json(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text + "\n")
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def cmd_gen(args) -> int:
    spec = GeneratorSpec(args.family, args.n, args.m, args.k, args.seed,
                         w_min=args.w_min, w_max=args.w_max, noise=args.noise)
    _emit(generate(spec).to_json(), args.output)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _read_instance(args.input)
    report = bench_mod.run(inst, args.algo.replace("_", "-"), args.epsilon, args.seed,
                           args.mode, args.budget)
    _emit(dumps(report), args.output)
    return EXIT_OK


def cmd_lp(args) -> int:
    inst = _read_instance(args.input)
    if not 0 < args.epsilon < 1:
        raise InputError("epsilon must lie in (0,1)")
    sol = solve_column_generation(LpProblem.full(inst), args.epsilon)
    cov = sol.fractional.cover()
    out = {"objective": float(sol.objective), "upper_bound": float(sol.upper_bound),
           "status": sol.status, "columns": len(sol.columns),
           "cover": {str(i): float(v) for i, v in sorted(cov.items())},
           "solution": sol.fractional.to_dict()}
    _emit(dumps(out), args.output)
    return EXIT_OK


def cmd_structure(args) -> int:
    from .structure import verify
    cert = verify(args.delta, args.seed, bins=args.bins, k=args.k, samples=args.samples)
    _emit(dumps(cert), args.output)
    return EXIT_OK if cert["passed"] else EXIT_FAIL


def cmd_bench(args) -> int:
    try:
        with open(args.suite, encoding="utf-8") as fh:
            suite = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {args.suite}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid suite JSON: {exc}") from None
    if not isinstance(suite, dict):
        raise InputError("suite JSON must be an object")
    result = bench_mod.bench(suite, args.output, args.workers)
    sys.stdout.write(dumps(result["aggregate"]["algorithms"]) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cmk", description="Multiple knapsack with a per-bin item limit.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--family", choices=FAMILIES, default="uniform")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--w-min", type=float, default=0.05)
    g.add_argument("--w-max", type=float, default=1.0)
    g.add_argument("--noise", type=float, default=0.1)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run one algorithm and write a report")
    s.add_argument("--algo", required=True,
                   choices=["iterative", "oneshot", "constant-bins", "local-search", "exact",
                            "dispatch"])
    s.add_argument("--epsilon", type=float, default=0.1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--mode", choices=["practical", "faithful"], default="practical")
    s.add_argument("--budget", type=int, default=cb.DEFAULT_BUDGET)
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    lp = sub.add_parser("lp", help="solve the configuration LP")
    lp.add_argument("--epsilon", type=float, default=0.01)
    lp.add_argument("-i", "--input", required=True)
    lp.add_argument("-o", "--output")
    lp.set_defaults(func=cmd_lp)

    st = sub.add_parser("structure", help="checks on grouping and fractional constructions")
    st_sub = st.add_subparsers(dest="action", required=True)
    v = st_sub.add_parser("verify", help="check a random packed instance, print a certificate")
    v.add_argument("--delta", default="1/2", help="1/q for an integer q >= 2, e.g. 1/3")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--bins", type=int, default=4)
    v.add_argument("--k", type=int, default=6)
    v.add_argument("--samples", type=int, default=3)
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_structure)

    b = sub.add_parser("bench", help="run a suite of instances, algorithms and seeds")
    b.add_argument("--suite", required=True)
    b.add_argument("-o", "--output", default=None, help="directory for runs.csv and aggregate.json")
    b.add_argument("--workers", type=int, default=None)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BudgetError, CapacityError) as exc:
        sys.stderr.write(f"cmk: {exc}\n")
        return EXIT_BUDGET
    except InputError as exc:
        sys.stderr.write(f"cmk: {exc}\n")
        return EXIT_INPUT
    except CmkError as exc:
        sys.stderr.write(f"cmk: {type(exc).__name__}: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
