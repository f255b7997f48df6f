"""Command-line entry point: ``nmcg {solve,list-problems,bench,nmf}``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from . import bench, nmf
from .nonmonotone import ETA_SCHEMES
from .problems import make_problem, problem_names, problem_specs, suite_instances, SUITE_DIMS
from .solver import SolverConfig, minimize, write_trace_csv


def _omega(text: str):
    if text == "adaptive":
        return text
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected 'adaptive' or a number in (0, 1)")
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError("fixed omega must lie in (0, 1)")
    return value


def _csv_list(text: str):
    return [t.strip() for t in text.split(",") if t.strip()]


def cmd_solve(args) -> int:
    problem = make_problem(args.problem, args.dim)
    cfg = SolverConfig(eta_scheme=args.eta_scheme, omega=args.omega, epsilon=args.tol,
                       max_iter=args.max_iter)
    rep = minimize(problem, cfg=cfg, record_trace=args.trace is not None)
    if args.trace is not None:
        write_trace_csv(rep.trace, args.trace)
    print(f"problem      {problem.name} (n={problem.dimension})")
    print(f"status       {rep.status.value}")
    print(f"iterations   {rep.iterations}")
    print(f"f evals      {rep.counters.function_evals}")
    print(f"g evals      {rep.counters.gradient_evals}")
    print(f"f            {rep.final_value:.12g}")
    print(f"||g||        {rep.final_gradient_norm:.3e}")
    print(f"time [s]     {rep.wall_time:.4f}")
    if rep.message:
        print(f"message      {rep.message}")
    return 0 if rep.converged else 1


def cmd_list(args) -> int:
    print(f"{'name':24s} {'dimensions':18s} {'known optimum':16s} source")
    for spec in problem_specs():
        dims = f"even n >= {spec.min_dim}" if spec.even_only else f"n >= {spec.min_dim}"
        print(f"{spec.name:24s} {dims:18s} {spec.optimum:16s} {spec.source}")
    return 0


def cmd_bench(args) -> int:
    solvers = {}
    for name in _csv_list(args.solvers):
        if name not in bench.SOLVER_PRESETS:
            raise SystemExit(f"unknown solver {name!r}; choose from {', '.join(bench.SOLVER_PRESETS)}")
        cfg = bench.SOLVER_PRESETS[name]
        solvers[name] = SolverConfig(**{**cfg.__dict__, "max_iter": args.max_iter})
    families = problem_names() if args.families == "all" else _csv_list(args.families)
    dims = [int(d) for d in _csv_list(args.dims)]
    metrics = list(bench.METRICS) if args.metrics == "all" else _csv_list(args.metrics)
    workers = 1 if args.sequential_timing else args.workers
    tables, records = bench.run_suite(solvers, suite_instances(families, dims), metrics,
                                      out_path=args.out, profile_path=None, workers=workers)
    if args.profiles:
        paths = bench.write_profiles_csv(tables, args.profiles)
        for metric, path in paths.items():
            print(f"profile[{metric}] -> {path}")
    solved = {s: sum(1 for r in records if r.solver == s and not r.failed) for s in solvers}
    total = len(records) // len(solvers)
    for s, count in solved.items():
        print(f"{s:10s} solved {count}/{total}")
    if args.out:
        print(f"runs -> {args.out}")
    return 0


def cmd_nmf(args) -> int:
    inner = nmf.InnerConfig()
    rows = []
    if args.input:
        V = np.loadtxt(args.input, delimiter=",", ndmin=2)
        seeds = range(args.seeds)
        matrices = [(V, s) for s in seeds]
    else:
        matrices = [(np.random.default_rng(10_000 + s).random((args.m, args.n)), s)
                    for s in range(args.seeds)]
    for V, seed in matrices:
        _, _, rep = nmf.anls(V, args.rank, args.eps, args.outer_cap, seed,
                             projected_gradient=args.projected_gradient, inner=inner)
        rows.append([V.shape[0], V.shape[1], args.rank, seed, rep.iter, rep.niter,
                     rep.pgn, rep.time, rep.error, "nmcg"])
        print(f"seed {seed}: iter={rep.iter} niter={rep.niter} pgn={rep.pgn:.4g} "
              f"time={rep.time:.3f}s error={rep.error:.4f}")
    if rows:
        arr = np.array([r[4:9] for r in rows], float)
        print("mean: iter={:.2f} niter={:.2f} pgn={:.4g} time={:.3f}s error={:.4f}".format(*arr.mean(axis=0)))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(nmf.REPORT_HEADER)
            w.writerows(rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nmcg", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="minimize one test problem")
    p.add_argument("--problem", required=True, choices=problem_names())
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--eta-scheme", default="trig", choices=ETA_SCHEMES)
    p.add_argument("--omega", type=_omega, default="adaptive")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=20000)
    p.add_argument("--trace", metavar="PATH", help="write the per-iteration trace as CSV")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("list-problems", help="list registered test problems")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("bench", help="run solvers over the problem suite")
    p.add_argument("--solvers", default="trig,ahookhosh,amini")
    p.add_argument("--families", default="all")
    p.add_argument("--dims", default=",".join(map(str, SUITE_DIMS)))
    p.add_argument("--metrics", default="all")
    p.add_argument("--max-iter", type=int, default=20000)
    p.add_argument("--out", metavar="PATH", help="per-run CSV")
    p.add_argument("--profiles", metavar="PATH",
                   help="profile CSV (one file per metric when several are requested)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--sequential-timing", action="store_true",
                   help="force sequential runs so timings are comparable")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("nmf", help="non-negative matrix factorization experiments")
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--rank", type=int, default=5)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--eps", type=float, default=1e-4)
    p.add_argument("--outer-cap", type=int, default=200)
    p.add_argument("--projected-gradient", action="store_true",
                   help="stop on the projected instead of the plain stacked gradient")
    p.add_argument("--input", metavar="CSV", help="factorize this matrix instead of random data")
    p.add_argument("--out", metavar="PATH", help="report CSV")
    p.set_defaults(func=cmd_nmf)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
