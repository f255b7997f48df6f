"""Benchmark harness and Dolan-More performance profiles.

For a metric table ``a[k, s]`` (problem ``k``, solver ``s``) the ratio is
``r[k, s] = a[k, s] / min_s a[k, s]`` and the profile of solver ``s`` is the
fraction of problems with ``r[k, s] <= tau``. Failed runs get ratio
``+inf`` so they never count as solved.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .problems import make_problem
from .solver import SolverConfig, Status, minimize

log = logging.getLogger(__name__)

METRICS = ("iterations", "function_evals", "gradient_evals", "time")
RUN_HEADER = ("problem", "n", "solver", "status", "iters", "fevals", "gevals", "time")
PROFILE_HEADER = ("solver", "tau", "p")


@dataclass
class ProfileTable:
    metric: str
    problems: List[Tuple[str, int]]
    solvers: List[str]
    values: np.ndarray  # shape (n_problems, n_solvers)
    failed: np.ndarray  # bool, same shape

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.failed = np.asarray(self.failed, dtype=bool)
        if self.values.shape != self.failed.shape:
            raise ValueError("values and failure mask must have the same shape")
        ok = ~self.failed
        if np.any(~np.isfinite(self.values[ok])) or np.any(self.values[ok] < 0):
            raise ValueError("non-failed entries must be finite and non-negative")


def performance_ratios(table: ProfileTable) -> np.ndarray:
    """Ratio matrix over the rows that have at least one successful solver.

    Rows where every solver failed are dropped with a warning. A row whose
    best value is 0 uses ratio 1 for every solver attaining that 0 and
    ``+inf`` for the others.
    """
    a = np.where(table.failed, np.inf, table.values)
    keep = ~np.all(table.failed, axis=1)
    for i in np.flatnonzero(~keep):
        name = table.problems[i] if i < len(table.problems) else i
        log.warning("every solver failed on %s; row excluded from the profile", name)
    a = a[keep]
    best = a.min(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = a / best
    zero = (best == 0) & np.isfinite(a)
    r[zero & (a == 0)] = 1.0
    r[zero & (a > 0)] = np.inf
    return r


def profile(ratios, tau_grid) -> np.ndarray:
    """``p[s, j]`` = fraction of problems with ``ratios[:, s] <= tau_grid[j]``."""
    r = np.asarray(ratios, dtype=float)
    tau = np.asarray(tau_grid, dtype=float)
    if tau.ndim != 1 or tau.size == 0 or np.any(np.diff(tau) <= 0) or tau[0] < 1:
        raise ValueError("tau grid must be strictly increasing and start at >= 1")
    if r.shape[0] == 0:
        return np.zeros((r.shape[1] if r.ndim == 2 else 0, tau.size))
    n_problems = r.shape[0]
    p = np.empty((r.shape[1], tau.size))
    for s in range(r.shape[1]):
        col = np.sort(r[:, s])
        p[s] = np.searchsorted(col, tau, side="right") / n_problems
    return p


def tau_grid(ratios, upper: float = 10.0, points: int = 91) -> np.ndarray:
    """Exact breakpoints (distinct finite ratios) merged with a uniform grid on [1, upper]."""
    r = np.asarray(ratios, dtype=float)
    finite = r[np.isfinite(r)]
    return np.unique(np.concatenate([[1.0], finite, np.linspace(1.0, upper, points)]))


# --- suite runner ---------------------------------------------------------

SOLVER_PRESETS = {
    "trig": SolverConfig(eta_scheme="trig"),
    "ahookhosh": SolverConfig(eta_scheme="ahookhosh"),
    "amini": SolverConfig(eta_scheme="amini"),
}


@dataclass
class RunRecord:
    problem: str
    n: int
    solver: str
    status: str
    iters: int
    fevals: int
    gevals: int
    time: float

    @property
    def failed(self) -> bool:
        return self.status != Status.CONVERGED.value

    def metric(self, name: str) -> float:
        return {"iterations": self.iters, "function_evals": self.fevals,
                "gradient_evals": self.gevals, "time": self.time}[name]


def _run_one(task) -> RunRecord:
    name, n, solver_name, cfg = task
    rep = minimize(make_problem(name, n), cfg=cfg)
    return RunRecord(name, n, solver_name, rep.status.value, rep.iterations,
                     rep.counters.function_evals, rep.counters.gradient_evals,
                     rep.wall_time)


def run_suite(solver_configs: Dict[str, SolverConfig], problem_instances: Sequence[Tuple[str, int]],
              metrics: Iterable[str] = METRICS, out_path=None, profile_path=None,
              workers: int = 1) -> Tuple[Dict[str, ProfileTable], List[RunRecord]]:
    """Run every solver on every problem instance and tabulate the metrics.

    With ``workers > 1`` runs execute in a process pool; results are always
    reported in (problem, solver) input order. Timing is only comparable
    with ``workers=1``.
    """
    solver_configs = dict(solver_configs)
    problem_instances = list(problem_instances)
    metrics = list(metrics)
    if not solver_configs or not problem_instances:
        raise ValueError("need at least one solver and one problem instance")
    for m in metrics:
        if m not in METRICS:
            raise ValueError(f"unknown metric {m!r}; choose from {', '.join(METRICS)}")

    tasks = [(name, n, s, cfg) for name, n in problem_instances
             for s, cfg in solver_configs.items()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_one, tasks))
    else:
        records = [_run_one(t) for t in tasks]

    solvers = list(solver_configs)
    tables = {}
    for metric in metrics:
        vals = np.array([r.metric(metric) for r in records], float).reshape(len(problem_instances), len(solvers))
        fail = np.array([r.failed for r in records]).reshape(vals.shape)
        tables[metric] = ProfileTable(metric, problem_instances, solvers, vals, fail)

    if out_path is not None:
        write_runs_csv(records, out_path)
    if profile_path is not None:
        write_profiles_csv(tables, profile_path)
    return tables, records


def write_runs_csv(records: List[RunRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RUN_HEADER)
        for r in records:
            w.writerow([r.problem, r.n, r.solver, r.status, r.iters, r.fevals, r.gevals,
                        f"{r.time:.6f}"])


def profile_paths(path, metrics: Sequence[str]) -> Dict[str, Path]:
    """One file per metric; a single metric writes to ``path`` itself."""
    path = Path(path)
    if len(metrics) == 1:
        return {metrics[0]: path}
    return {m: path.with_name(f"{path.stem}_{m}{path.suffix}") for m in metrics}


def write_profiles_csv(tables: Dict[str, ProfileTable], path) -> Dict[str, Path]:
    paths = profile_paths(path, list(tables))
    for metric, table in tables.items():
        r = performance_ratios(table)
        taus = tau_grid(r)
        p = profile(r, taus)
        with open(paths[metric], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(PROFILE_HEADER)
            for s, name in enumerate(table.solvers):
                for tau, val in zip(taus, p[s]):
                    w.writerow([name, repr(float(tau)), repr(float(val))])
    return paths
