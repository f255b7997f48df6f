"""Problem abstraction, evaluation counting and finite-difference gradient checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.typing import NDArray

Vector = NDArray[np.float64]


class EvaluationError(ArithmeticError):
    """Objective or gradient returned a non-finite result."""

    def __init__(self, message: str, coordinate: Optional[int] = None):
        super().__init__(message)
        self.coordinate = coordinate


@dataclass(frozen=True)
class DifferentiableProblem:
    """A smooth objective ``f: R^n -> R`` with analytic gradient.

    Instances are immutable and hold no evaluation state, so one problem may
    be shared between concurrent solver runs. Use :class:`CountingProblem`
    to count evaluations for a single run.
    """

    name: str
    dimension: int
    value: Callable[[Vector], float]
    gradient: Callable[[Vector], Vector]
    initial_point: Vector
    known_optimum: Optional[float] = None

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be positive, got {self.dimension}")
        x0 = np.asarray(self.initial_point, dtype=float)
        if x0.shape != (self.dimension,):
            raise ValueError(
                f"initial point has shape {x0.shape}, expected ({self.dimension},)"
            )
        x0.setflags(write=False)
        object.__setattr__(self, "initial_point", x0)


@dataclass
class EvalCounters:
    function_evals: int = 0
    gradient_evals: int = 0


class CountingProblem:
    """Per-run wrapper that counts calls to ``value`` and ``gradient``."""

    def __init__(self, problem: DifferentiableProblem):
        self.problem = problem
        self.counters = EvalCounters()

    @property
    def dimension(self) -> int:
        return self.problem.dimension

    def value(self, x: Vector) -> float:
        self.counters.function_evals += 1
        return float(self.problem.value(x))

    def gradient(self, x: Vector) -> Vector:
        self.counters.gradient_evals += 1
        g = np.asarray(self.problem.gradient(x), dtype=float)
        if g.shape != (self.problem.dimension,):
            raise ValueError(
                f"{self.problem.name}: gradient has shape {g.shape}, "
                f"expected ({self.problem.dimension},)"
            )
        return g


def check_gradient(problem: DifferentiableProblem, x, h: float = 1e-6) -> float:
    """Compare the analytic gradient with central differences.

    Returns ``max_i |cd_i - g_i| / max(1, |g_i|)`` where ``cd_i`` is the
    central difference along coordinate ``i`` with step ``h``.
    """
    if not h > 0:
        raise ValueError(f"step h must be positive, got {h}")
    x = np.array(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    g = np.asarray(problem.gradient(x), dtype=float)
    if not np.all(np.isfinite(g)):
        bad = int(np.flatnonzero(~np.isfinite(g))[0])
        raise EvaluationError(f"non-finite gradient at x (coordinate {bad})", bad)

    worst = 0.0
    for i in range(x.size):
        xi = x[i]
        x[i] = xi + h
        fp = problem.value(x)
        x[i] = xi - h
        fm = problem.value(x)
        x[i] = xi
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise EvaluationError(
                f"non-finite value at x +/- h*e_{i}", i
            )
        cd = (fp - fm) / (2.0 * h)
        worst = max(worst, abs(cd - g[i]) / max(1.0, abs(g[i])))
    return worst
