"""Non-monotone conjugate gradient driver.

Each outer iteration starts the backtracking line search from the
Barzilai-Borwein trial step, accepts the first ``alpha0 * rho**j`` that
passes the non-monotone Armijo test against the reference value ``R_k``,
then builds the next direction from the bounded CG parameter and refreshes
the non-monotone parameter from the new gradient.
"""

from __future__ import annotations

import csv
import enum
import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Union

import numpy as np

from .core import CountingProblem, DifferentiableProblem, EvalCounters, EvaluationError
from .direction import beta_new, direction, omega_adaptive
from .nonmonotone import (
    ETA_SCHEMES,
    EtaSchedule,
    NonmonotoneMemory,
    reference_value,
    update_memory,
)
from .stepsize import ALPHA_MAX, ALPHA_MIN, StepPair, cbb_step, initial_step

TRACE_HEADER = ("k", "f", "gnorm", "alpha", "eta", "beta", "flk", "Rk")

# Called as beta_rule(g, g_prev, d_prev) -> beta.
BetaRule = Callable[[np.ndarray, np.ndarray, np.ndarray], float]


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    ITERATION_LIMIT = "IterationLimit"
    LINE_SEARCH_FAILURE = "LineSearchFailure"
    NUMERICAL_ERROR = "NumericalError"


class LineSearchFailure(RuntimeError):
    def __init__(self, alpha: float, evals: int):
        super().__init__(f"line search failed after {evals} trials (last alpha={alpha:g})")
        self.alpha = alpha
        self.evals = evals


@dataclass(frozen=True)
class SolverConfig:
    gamma: float = 1e-4
    rho: float = 0.75
    N: int = 5
    c: float = 1e-4  # sufficient-descent constant; reported, not used by the iteration
    epsilon: float = 1e-6
    max_iter: int = 20000
    eta_scheme: str = "trig"
    omega: Union[str, float] = "adaptive"
    alpha_min: float = ALPHA_MIN
    alpha_max: float = ALPHA_MAX
    backtrack_cap: int = 60

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not 0 < self.rho < 1:
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")
        if self.N < 0:
            raise ValueError(f"N must be nonnegative, got {self.N}")
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be positive, got {self.max_iter}")
        if self.eta_scheme not in ETA_SCHEMES:
            raise ValueError(f"unknown eta scheme {self.eta_scheme!r}")
        if isinstance(self.omega, str):
            if self.omega != "adaptive":
                raise ValueError(f"omega must be 'adaptive' or a number in (0, 1), got {self.omega!r}")
        elif not 0 < self.omega < 1:
            raise ValueError(f"fixed omega must lie in (0, 1), got {self.omega}")
        if not 0 < self.alpha_min <= self.alpha_max:
            raise ValueError("need 0 < alpha_min <= alpha_max")
        if self.backtrack_cap < 1:
            raise ValueError(f"backtrack_cap must be positive, got {self.backtrack_cap}")


@dataclass
class TraceRecord:
    k: int
    f: float
    gnorm: float
    alpha: float
    eta: float
    beta: float
    flk: float
    Rk: float
    # diagnostics for the invariant checks
    omega: float = 0.0
    gtd: float = 0.0
    dnorm: float = 0.0
    alpha0: float = 0.0
    f_next: float = math.nan
    backtracks: int = 0


@dataclass
class SolverReport:
    status: Status
    iterations: int
    counters: EvalCounters
    final_gradient_norm: float
    final_value: float
    final_point: np.ndarray
    wall_time: float
    trace: Optional[List[TraceRecord]] = None
    restarts: int = 0
    message: str = ""

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


def backtrack(problem, x, d, g, R: float, alpha0: float, cfg: SolverConfig,
              nonnegative: bool = False):
    """Shrink ``alpha0`` by ``rho`` until ``f(x + a d) <= R + gamma a g'd``.

    Returns ``(alpha, f_new, evals)``. With ``nonnegative`` the trial point
    is clipped at zero before evaluation. Raises :class:`LineSearchFailure`
    once more than ``cfg.backtrack_cap`` reductions would be needed.
    """
    gtd = float(g @ d)
    alpha = alpha0
    for j in range(cfg.backtrack_cap + 1):
        trial = x + alpha * d
        if nonnegative:
            np.maximum(trial, 0.0, out=trial)
        with np.errstate(over="ignore", invalid="ignore"):
            f_new = problem.value(trial)
        # NaN compares false, so a non-finite trial is treated as a rejection.
        if f_new <= R + cfg.gamma * alpha * gtd:
            return alpha, f_new, j + 1
        if j < cfg.backtrack_cap:
            alpha *= cfg.rho
    raise LineSearchFailure(alpha, cfg.backtrack_cap + 1)


def _stationarity(x, g, nonnegative: bool):
    if nonnegative:
        return np.where(x > 0, g, np.minimum(g, 0.0))
    return g


def minimize(problem: DifferentiableProblem, x0=None, cfg: Optional[SolverConfig] = None,
             *, record_trace: bool = False, beta_rule: Optional[BetaRule] = None,
             nonnegative: bool = False) -> SolverReport:
    """Minimize ``problem`` from ``x0`` (default: the problem's initial point).

    ``beta_rule`` replaces the built-in CG parameter, which lets other CG
    variants run through the same line search and bookkeeping.

    ``nonnegative`` restricts iterates to the orthant: trial points are
    clipped at zero, direction components that would leave the orthant at
    active coordinates are dropped, and the stopping test uses the
    projected gradient.
    """
    cfg = cfg or SolverConfig()
    x = np.array(problem.initial_point if x0 is None else x0, dtype=float)
    if x.shape != (problem.dimension,):
        raise ValueError(f"x0 has shape {x.shape}, expected ({problem.dimension},)")
    if nonnegative:
        np.maximum(x, 0.0, out=x)

    prob = CountingProblem(problem)
    start = time.perf_counter()
    f = prob.value(x)
    if not math.isfinite(f):
        raise EvaluationError(f"{problem.name}: objective is not finite at x0")
    g = prob.gradient(x)

    trace: Optional[List[TraceRecord]] = [] if record_trace else None
    eta_schedule = EtaSchedule(cfg.eta_scheme)
    memory = update_memory(NonmonotoneMemory(N=cfg.N), f)
    memory.eta = eta_schedule.initial(g)

    pg = _stationarity(x, g, nonnegative)
    gnorm = float(np.linalg.norm(pg))
    d = _restrict(-pg, x) if nonnegative else -g
    omega, beta = 0.0, 0.0
    alpha0 = initial_step(pg, cfg.alpha_min, cfg.alpha_max)
    restarts = 0
    k = 0
    status, message = Status.CONVERGED, ""

    def report(status: Status, msg: str = "") -> SolverReport:
        return SolverReport(
            status=status,
            iterations=k,
            counters=EvalCounters(prob.counters.function_evals, prob.counters.gradient_evals),
            final_gradient_norm=gnorm,
            final_value=f,
            final_point=x,
            wall_time=time.perf_counter() - start,
            trace=trace,
            restarts=restarts,
            message=msg,
        )

    while gnorm >= cfg.epsilon:
        if k >= cfg.max_iter:
            return report(Status.ITERATION_LIMIT, f"reached {cfg.max_iter} iterations")
        R = reference_value(memory, f)
        try:
            alpha, f_new, evals = backtrack(prob, x, d, g, R, alpha0, cfg, nonnegative)
        except LineSearchFailure as exc:
            return report(Status.LINE_SEARCH_FAILURE, str(exc))

        x_new = x + alpha * d
        if nonnegative:
            np.maximum(x_new, 0.0, out=x_new)
        g_new = prob.gradient(x_new)
        if not (math.isfinite(f_new) and np.all(np.isfinite(g_new))):
            return report(Status.NUMERICAL_ERROR, f"non-finite gradient at iteration {k}")

        if trace is not None:
            trace.append(TraceRecord(
                k=k, f=f, gnorm=gnorm, alpha=alpha, eta=memory.eta, beta=beta,
                flk=memory.f_lk, Rk=R, omega=omega, gtd=float(g @ d),
                dnorm=float(np.linalg.norm(d)), alpha0=alpha0, f_next=f_new,
                backtracks=evals - 1,
            ))

        alpha0 = cbb_step(StepPair(x_new - x, g_new - g), cfg.alpha_min, cfg.alpha_max)

        if beta_rule is not None:
            omega = math.nan
            beta = float(beta_rule(g_new, g, d))
        else:
            omega = cfg.omega if not isinstance(cfg.omega, str) else omega_adaptive(g_new, g, d)
            beta = beta_new(g_new, d, omega)

        pg_new = _stationarity(x_new, g_new, nonnegative)
        d_new = direction(g_new, d, beta)
        if nonnegative:
            d_new = _restrict(d_new, x_new)
        if float(g_new @ d_new) > -1e-12 * float(pg_new @ pg_new):
            # floating-point safety net; exact arithmetic never gets here
            d_new = _restrict(-pg_new, x_new) if nonnegative else -g_new
            omega, beta = 0.0, 0.0
            restarts += 1

        k += 1
        memory.eta = eta_schedule.advance(k, g_new)
        update_memory(memory, f_new)
        x, f, g, d = x_new, f_new, g_new, d_new
        gnorm = float(np.linalg.norm(pg_new))

    return report(status, message)


def _restrict(d, x):
    d = d.copy()
    d[(x <= 0) & (d < 0)] = 0.0
    return d


def write_trace_csv(trace: List[TraceRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for rec in trace:
            writer.writerow([rec.k] + [repr(float(getattr(rec, name))) for name in TRACE_HEADER[1:]])
