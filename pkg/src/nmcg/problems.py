"""Unconstrained test problems with analytic gradients.

Most families follow N. Andrei, "An unconstrained optimization test
functions collection" (Adv. Model. Optim. 10, 2008); each ``source``
field gives the function's name there. ``fig1_demo`` is the shifted
sphere used to illustrate the eta schemes, and ``generalized_quadratic`` is
defined here (see its docstring).

Every factory takes the dimension ``n`` and returns an immutable
:class:`~nmcg.core.DifferentiableProblem` with the collection's starting
point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from .core import DifferentiableProblem


class UnknownProblem(KeyError):
    pass


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    build: Callable[[int], DifferentiableProblem]
    even_only: bool
    min_dim: int
    optimum: str  # human-readable known optimum for list-problems
    source: str


_REGISTRY: Dict[str, ProblemSpec] = {}


def register(name: str, *, even_only: bool = False, min_dim: int = 1,
             optimum: str = "0", source: str = ""):
    def deco(fn):
        _REGISTRY[name] = ProblemSpec(name, fn, even_only, min_dim, optimum, source)
        return fn
    return deco


def make_problem(name: str, n: int) -> DifferentiableProblem:
    try:
        spec = _REGISTRY[name]
    except KeyError:
        raise UnknownProblem(
            f"unknown problem {name!r}; known: {', '.join(sorted(_REGISTRY))}"
        ) from None
    if n < spec.min_dim:
        raise ValueError(f"{name} needs n >= {spec.min_dim}, got {n}")
    if spec.even_only and n % 2:
        raise ValueError(f"{name} needs an even dimension, got {n}")
    return spec.build(n)


def problem_names():
    return list(_REGISTRY)


def problem_specs():
    return list(_REGISTRY.values())


def _pairs(x):
    return x[0::2], x[1::2]


def _interleave(a, b):
    out = np.empty(a.size + b.size)
    out[0::2] = a
    out[1::2] = b
    return out


@register("fig1_demo", min_dim=2, source="(x0-5)^2 + sum_{i>=1} (x_i-1)^2")
def fig1_demo(n: int) -> DifferentiableProblem:
    """Shifted sphere; minimizer (5, 1, ..., 1). Gradient is 2-Lipschitz."""
    target = np.ones(n)
    target[0] = 5.0

    def value(x):
        r = x - target
        return float(r @ r)

    def gradient(x):
        return 2.0 * (x - target)

    return DifferentiableProblem("fig1_demo", n, value, gradient, np.zeros(n), 0.0)


@register("extended_rosenbrock", even_only=True, min_dim=2, source="EXTENDED ROSENBROCK")
def extended_rosenbrock(n: int, c: float = 100.0) -> DifferentiableProblem:
    def value(x):
        u, v = _pairs(x)
        return float(np.sum(c * (v - u**2) ** 2 + (1.0 - u) ** 2))

    def gradient(x):
        u, v = _pairs(x)
        t = v - u**2
        return _interleave(-4.0 * c * u * t - 2.0 * (1.0 - u), 2.0 * c * t)

    x0 = np.tile([-1.2, 1.0], n // 2)
    return DifferentiableProblem("extended_rosenbrock", n, value, gradient, x0, 0.0)


@register("extended_white_holst", even_only=True, min_dim=2, source="EXTENDED WHITE & HOLST")
def extended_white_holst(n: int, c: float = 100.0) -> DifferentiableProblem:
    def value(x):
        u, v = _pairs(x)
        t = v - u * u * u
        r = 1.0 - u
        return float(c * (t @ t) + r @ r)

    def gradient(x):
        u, v = _pairs(x)
        t = v - u * u * u
        return _interleave(-6.0 * c * u * u * t - 2.0 * (1.0 - u), 2.0 * c * t)

    x0 = np.tile([-1.2, 1.0], n // 2)
    return DifferentiableProblem("extended_white_holst", n, value, gradient, x0, 0.0)


@register("extended_beale", even_only=True, min_dim=2, source="EXTENDED BEALE")
def extended_beale(n: int) -> DifferentiableProblem:
    consts = (1.5, 2.25, 2.625)

    def value(x):
        u, v = _pairs(x)
        return float(sum(np.sum((c - u * (1.0 - v**p)) ** 2)
                         for p, c in enumerate(consts, start=1)))

    def gradient(x):
        u, v = _pairs(x)
        gu = np.zeros_like(u)
        gv = np.zeros_like(v)
        for p, c in enumerate(consts, start=1):
            r = c - u * (1.0 - v**p)
            gu += -2.0 * r * (1.0 - v**p)
            gv += 2.0 * r * u * p * v ** (p - 1)
        return _interleave(gu, gv)

    x0 = np.tile([1.0, 0.8], n // 2)
    return DifferentiableProblem("extended_beale", n, value, gradient, x0, 0.0)


@register("raydan1", optimum="n(n+1)/20", source="RAYDAN 1")
def raydan1(n: int) -> DifferentiableProblem:
    """sum (i/10)(exp(x_i) - x_i); minimizer x = 0."""
    w = np.arange(1, n + 1) / 10.0

    def value(x):
        return float(w @ (np.expm1(x) - x) + w.sum())

    def gradient(x):
        return w * np.expm1(x)

    return DifferentiableProblem("raydan1", n, value, gradient, np.ones(n),
                                 float(w.sum()))


@register("diagonal1", optimum="sum i(1 - ln i)", source="DIAGONAL 1")
def diagonal1(n: int) -> DifferentiableProblem:
    """sum exp(x_i) - i x_i; minimizer x_i = ln i."""
    i = np.arange(1, n + 1, dtype=float)

    def value(x):
        return float(np.sum(np.exp(x) - i * x))

    def gradient(x):
        return np.exp(x) - i

    return DifferentiableProblem("diagonal1", n, value, gradient, np.full(n, 1.0 / n),
                                 float(np.sum(i - i * np.log(i))))


@register("extended_tridiagonal1", even_only=True, min_dim=2, source="EXTENDED TRIDIAGONAL 1")
def extended_tridiagonal1(n: int) -> DifferentiableProblem:
    def value(x):
        u, v = _pairs(x)
        a = u + v - 3.0
        b = u - v + 1.0
        b *= b
        return float(a @ a + b @ b)

    def gradient(x):
        u, v = _pairs(x)
        a = 2.0 * (u + v - 3.0)
        t = u - v + 1.0
        b = 4.0 * t * t * t
        return _interleave(a + b, a - b)

    return DifferentiableProblem("extended_tridiagonal1", n, value, gradient,
                                 np.full(n, 2.0), 0.0)


@register("generalized_quadratic", source="in-repo: sum x_i^2 + sum (x_{i+1}-x_i)^2")
def generalized_quadratic(n: int) -> DifferentiableProblem:
    """Coupled quadratic ``sum x_i^2 + sum_{i<n} (x_{i+1} - x_i)^2``.

    The Hessian is ``2 (I + L)`` with ``L`` the path-graph Laplacian, so its
    spectrum lies in ``[2, 10)`` for every ``n``. Minimizer is the origin.
    """

    def value(x):
        dx = np.diff(x)
        return float(x @ x + dx @ dx)

    def gradient(x):
        dx = np.diff(x)
        g = 2.0 * x
        g[:-1] -= 2.0 * dx
        g[1:] += 2.0 * dx
        return g

    x0 = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    return DifferentiableProblem("generalized_quadratic", n, value, gradient, x0, 0.0)


@register("perturbed_quadratic", source="PERTURBED QUADRATIC")
def perturbed_quadratic(n: int) -> DifferentiableProblem:
    """sum i x_i^2 + (sum x_i)^2 / 100."""
    i = np.arange(1, n + 1, dtype=float)

    def value(x):
        s = x.sum()
        return float(i @ (x * x) + s * s / 100.0)

    def gradient(x):
        return 2.0 * i * x + x.sum() / 50.0

    return DifferentiableProblem("perturbed_quadratic", n, value, gradient,
                                 np.full(n, 0.5), 0.0)


@register("extended_himmelblau", even_only=True, min_dim=2, source="EXTENDED HIMMELBLAU")
def extended_himmelblau(n: int) -> DifferentiableProblem:
    def value(x):
        u, v = _pairs(x)
        return float(np.sum((u**2 + v - 11.0) ** 2 + (u + v**2 - 7.0) ** 2))

    def gradient(x):
        u, v = _pairs(x)
        a = u**2 + v - 11.0
        b = u + v**2 - 7.0
        return _interleave(4.0 * u * a + 2.0 * b, 2.0 * a + 4.0 * v * b)

    return DifferentiableProblem("extended_himmelblau", n, value, gradient, np.ones(n), 0.0)


@register("fletchcr", min_dim=2, source="FLETCHCR (CUTE)")
def fletchcr(n: int, c: float = 100.0) -> DifferentiableProblem:
    """sum_{i<n} c (x_{i+1} - x_i + 1 - x_i^2)^2; zero at x = 1."""

    def value(x):
        r = x[1:] - x[:-1] + 1.0 - x[:-1] ** 2
        return float(c * r @ r)

    def gradient(x):
        r = 2.0 * c * (x[1:] - x[:-1] + 1.0 - x[:-1] ** 2)
        g = np.zeros_like(x)
        g[1:] += r
        g[:-1] += r * (-1.0 - 2.0 * x[:-1])
        return g

    return DifferentiableProblem("fletchcr", n, value, gradient, np.zeros(n), 0.0)


@register("quadratic_qf1", optimum="-1/(2n)", source="QUADRATIC QF1")
def quadratic_qf1(n: int) -> DifferentiableProblem:
    """0.5 sum i x_i^2 - x_n. Gradient Lipschitz constant is ``n``."""
    i = np.arange(1, n + 1, dtype=float)

    def value(x):
        return float(0.5 * i @ (x * x) - x[-1])

    def gradient(x):
        g = i * x
        g[-1] -= 1.0
        return g

    return DifferentiableProblem("quadratic_qf1", n, value, gradient, np.ones(n),
                                 -0.5 / n)


def lipschitz_constant(name: str, n: int) -> Optional[float]:
    """Gradient Lipschitz constant for the quadratic families, else ``None``."""
    if name == "fig1_demo":
        return 2.0
    if name == "quadratic_qf1":
        return float(n)
    if name == "generalized_quadratic":
        return 10.0
    if name == "perturbed_quadratic":
        return 2.0 * n + n / 50.0
    return None


SUITE_DIMS = (100, 1000, 10000)


def suite_instances(families=None, dims=SUITE_DIMS):
    """(family, n) pairs of the benchmark suite, family-major."""
    families = list(_REGISTRY) if families is None else list(families)
    return [(name, n) for name in families for n in dims]
