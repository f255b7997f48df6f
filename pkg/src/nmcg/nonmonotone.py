"""Non-monotone parameter schemes and the reference value used by the line search.

The line search accepts a step when

    f(x + a d) <= R + gamma * a * g'd,     R = eta * f_max + (1 - eta) * f

where ``f_max`` is the largest of the last ``m + 1`` objective values and
``m = min(m_prev + 1, N)``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

ETA_SCHEMES = ("trig", "ahookhosh", "amini")

AHOOKHOSH_ETA0 = 0.15
AMINI_ETA0 = 0.95


def eta_trig(gradient_norm: float) -> float:
    """Trigonometric scheme: close to 0.96 far from a minimizer, 0.01 at it."""
    t = gradient_norm
    if math.isinf(t):
        return 0.96
    return 0.95 * math.sin(math.pi * t / (1.0 + 2.0 * t)) + 0.01


def eta_ahookhosh(k: int, eta0: float = AHOOKHOSH_ETA0) -> float:
    return eta0 * (-0.5) ** k / 3.0 + 2.0 * eta0 / 3.0


def eta_amini(eta_prev: float, gradient_inf_norm: float) -> float:
    if gradient_inf_norm <= 1e-3:
        return 2.0 * eta_prev / 3.0 + 0.01
    return max(0.99 * eta_prev, 0.5)


@dataclass
class NonmonotoneMemory:
    """Sliding window of recent objective values.

    ``window`` holds at most ``N + 1`` values, newest last. ``m`` is the
    current extent, so ``f_lk`` is the max over the last ``m + 1`` entries.
    """

    N: int = 5
    eta: float = 0.0
    window: deque = field(default_factory=deque)
    m: int = 0
    f_lk: float = -math.inf

    def __post_init__(self):
        if self.N < 0:
            raise ValueError(f"N must be nonnegative, got {self.N}")
        self.window = deque(self.window, maxlen=self.N + 1)
        if self.window:
            self.m = min(self.m, len(self.window) - 1, self.N)
            self.f_lk = max(list(self.window)[-(self.m + 1):])


def update_memory(memory: NonmonotoneMemory, f_new: float) -> NonmonotoneMemory:
    """Push ``f_new``; the first value pushed leaves ``m = 0``."""
    if not math.isfinite(f_new):
        raise ValueError(f"objective value must be finite, got {f_new}")
    first = not memory.window
    memory.window.append(float(f_new))
    memory.m = 0 if first else min(memory.m + 1, memory.N)
    memory.f_lk = max(list(memory.window)[-(memory.m + 1):])
    return memory


def reference_value(memory: NonmonotoneMemory, f_k: float) -> float:
    # f + eta (f_max - f) keeps R >= f exactly in floating point
    return f_k + memory.eta * (memory.f_lk - f_k)


class EtaSchedule:
    """Produces eta_0, eta_1, ... for one solver run.

    ``initial`` is called with the starting gradient, ``advance`` after each
    accepted step with the new iteration index and gradient.
    """

    def __init__(self, scheme: str = "trig", fixed: float | None = None):
        if scheme not in ETA_SCHEMES and scheme != "fixed":
            raise ValueError(
                f"unknown eta scheme {scheme!r}; choose from {', '.join(ETA_SCHEMES)}"
            )
        if scheme == "fixed" and (fixed is None or not 0.0 <= fixed <= 1.0):
            raise ValueError("fixed eta scheme needs a value in [0, 1]")
        self.scheme = scheme
        self.fixed = fixed
        self.eta = math.nan

    def initial(self, g) -> float:
        if self.scheme == "trig":
            self.eta = eta_trig(float(np.linalg.norm(g)))
        elif self.scheme == "ahookhosh":
            self.eta = eta_ahookhosh(0)
        elif self.scheme == "amini":
            self.eta = AMINI_ETA0
        else:
            self.eta = self.fixed
        return self.eta

    def advance(self, k: int, g) -> float:
        if self.scheme == "trig":
            self.eta = eta_trig(float(np.linalg.norm(g)))
        elif self.scheme == "ahookhosh":
            self.eta = eta_ahookhosh(k)
        elif self.scheme == "amini":
            self.eta = eta_amini(self.eta, float(np.max(np.abs(g))) if g.size else 0.0)
        return self.eta
