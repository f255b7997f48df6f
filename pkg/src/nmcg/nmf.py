"""Non-negative matrix factorization by alternating non-negative least squares.

``V ~ W H`` with ``W, H >= 0`` is found by alternately minimizing
``F(W, H) = 0.5 ||V - W H||_F^2`` over ``W`` with ``H`` fixed and over ``H``
with ``W`` fixed. Each convex subproblem is solved inexactly by the
non-monotone CG solver restricted to the non-negative orthant.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from .core import DifferentiableProblem
from .solver import BetaRule, SolverConfig, Status, minimize

log = logging.getLogger(__name__)

REPORT_HEADER = ("m", "n", "k", "seed", "iter", "niter", "pgn", "time", "error", "algorithm")


def nmf_objective(V, W, H) -> float:
    V, W, H = np.asarray(V, float), np.asarray(W, float), np.asarray(H, float)
    _check_shapes(V, W, H)
    R = V - W @ H
    return 0.5 * float(np.sum(R * R))


def _check_shapes(V, W, H):
    if V.ndim != 2 or W.ndim != 2 or H.ndim != 2:
        raise ValueError("V, W and H must be 2-D")
    if W.shape[1] != H.shape[0] or (W.shape[0], H.shape[1]) != V.shape:
        raise ValueError(
            f"shapes do not conform: V{V.shape}, W{W.shape}, H{H.shape}"
        )


def gradients(V, W, H):
    """``(grad_W, grad_H)`` of ``F`` at ``(W, H)``."""
    R = W @ H - V
    return R @ H.T, W.T @ R


def _projected(G, X):
    return np.where(X > 0, G, np.minimum(G, 0.0))


def stacked_gradient_norm(V, W, H, projected: bool = False) -> float:
    """Frobenius norm of ``[grad_H F, grad_W F]``, optionally orthant-projected."""
    gW, gH = gradients(V, W, H)
    if projected:
        gW, gH = _projected(gW, W), _projected(gH, H)
    return float(np.sqrt(np.sum(gW * gW) + np.sum(gH * gH)))


def relative_error(V, W, H) -> float:
    vnorm = float(np.linalg.norm(V))
    res = float(np.linalg.norm(V - W @ H))
    return res / vnorm if vnorm > 0 else res


class SubproblemResult(NamedTuple):
    X: np.ndarray
    iterations: int
    failed: bool


@dataclass(frozen=True)
class InnerConfig:
    tol: float = 1e-4  # relative to the first projected gradient norm
    max_iter: int = 50
    eta_scheme: str = "trig"


def _subproblem(name, shape, value, gradient, X_start, inner: InnerConfig,
                beta_rule: Optional[BetaRule]) -> SubproblemResult:
    x0 = np.asarray(X_start, float).ravel()
    problem = DifferentiableProblem(
        name, x0.size,
        lambda x: value(x.reshape(shape)),
        lambda x: gradient(x.reshape(shape)).ravel(),
        x0,
    )
    g0 = gradient(x0.reshape(shape)).ravel()
    pg0 = float(np.linalg.norm(np.where(x0 > 0, g0, np.minimum(g0, 0.0))))
    if pg0 == 0.0:
        return SubproblemResult(np.array(X_start, float), 0, False)
    cfg = SolverConfig(epsilon=inner.tol * pg0, max_iter=inner.max_iter,
                       eta_scheme=inner.eta_scheme)
    rep = minimize(problem, x0, cfg, nonnegative=True, beta_rule=beta_rule)
    if rep.status is Status.NUMERICAL_ERROR:
        log.warning("%s subproblem: %s; keeping the previous factor", name, rep.message)
        return SubproblemResult(np.array(X_start, float), rep.iterations, True)
    # A line-search failure here means no representable decrease is left;
    # the last accepted iterate is feasible and no worse than the start.
    failed = rep.status is Status.LINE_SEARCH_FAILURE
    if failed:
        log.info("%s subproblem stopped after %d iterations: %s", name, rep.iterations, rep.message)
    return SubproblemResult(rep.final_point.reshape(shape), rep.iterations, failed)


def solve_subproblem_W(V, H, W_start, inner: InnerConfig = InnerConfig(),
                       beta_rule: Optional[BetaRule] = None) -> SubproblemResult:
    """Approximately minimize ``F(., H)`` over ``W >= 0``."""
    V, H = np.asarray(V, float), np.asarray(H, float)
    _check_shapes(V, np.asarray(W_start), H)
    if np.any(H < 0) or np.any(np.asarray(W_start) < 0):
        raise ValueError("H and W_start must be non-negative")

    def value(W):
        R = W @ H - V
        return 0.5 * float(np.sum(R * R))

    def gradient(W):
        return (W @ H - V) @ H.T

    return _subproblem("nmf_W", np.shape(W_start), value, gradient, W_start, inner, beta_rule)


def solve_subproblem_H(V, W, H_start, inner: InnerConfig = InnerConfig(),
                       beta_rule: Optional[BetaRule] = None) -> SubproblemResult:
    """Approximately minimize ``F(W, .)`` over ``H >= 0``."""
    V, W = np.asarray(V, float), np.asarray(W, float)
    _check_shapes(V, W, np.asarray(H_start))
    if np.any(W < 0) or np.any(np.asarray(H_start) < 0):
        raise ValueError("W and H_start must be non-negative")

    def value(H):
        R = W @ H - V
        return 0.5 * float(np.sum(R * R))

    def gradient(H):
        return W.T @ (W @ H - V)

    return _subproblem("nmf_H", np.shape(H_start), value, gradient, H_start, inner, beta_rule)


@dataclass
class NmfReport:
    iter: int
    niter: int
    pgn: float
    time: float
    error: float
    converged: bool = False
    objective_history: List[float] = field(default_factory=list)
    subproblem_failures: int = 0


def anls(V, k: int, epsilon: float = 1e-4, outer_cap: int = 200, seed: int = 0,
         *, projected_gradient: bool = False, inner: InnerConfig = InnerConfig(),
         beta_rule: Optional[BetaRule] = None, W0=None, H0=None):
    """Factorize ``V ~ W H`` with rank ``k``.

    Starts from ``W, H`` uniform in ``[0, 1]`` drawn from ``seed`` (unless
    ``W0``/``H0`` are given) and alternates the W and H subproblems until
    the stacked gradient norm falls to ``epsilon`` times its initial value
    or ``outer_cap`` sweeps have run.

    Returns ``(W, H, report)``.
    """
    V = np.asarray(V, dtype=float)
    if V.ndim != 2:
        raise ValueError("V must be a 2-D matrix")
    if np.any(V < 0) or not np.all(np.isfinite(V)):
        raise ValueError("V must be finite and non-negative")
    m, n = V.shape
    if not 1 <= k <= min(m, n):
        raise ValueError(f"rank k must lie in [1, {min(m, n)}], got {k}")

    rng = np.random.default_rng(seed)
    W = rng.random((m, k)) if W0 is None else np.array(W0, float)
    H = rng.random((k, n)) if H0 is None else np.array(H0, float)

    start = time.perf_counter()
    pgn0 = stacked_gradient_norm(V, W, H, projected_gradient)
    pgn = pgn0
    history = [nmf_objective(V, W, H)]
    it = niter = failures = 0
    converged = pgn <= epsilon * pgn0
    while not converged and it < outer_cap:
        res = solve_subproblem_W(V, H, W, inner, beta_rule)
        W = res.X
        niter += res.iterations
        failures += res.failed
        res = solve_subproblem_H(V, W, H, inner, beta_rule)
        H = res.X
        niter += res.iterations
        failures += res.failed
        it += 1
        history.append(nmf_objective(V, W, H))
        pgn = stacked_gradient_norm(V, W, H, projected_gradient)
        converged = pgn <= epsilon * pgn0

    report = NmfReport(
        iter=it, niter=niter, pgn=pgn, time=time.perf_counter() - start,
        error=relative_error(V, W, H), converged=converged,
        objective_history=history, subproblem_failures=failures,
    )
    return W, H, report
