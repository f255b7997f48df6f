"""Search direction with the bounded CG parameter ``beta = omega * ||g|| / ||d_prev||``.

For any ``omega`` in ``[0, 1)`` the resulting direction satisfies

    g'd <= -(1 - omega) ||g||^2    and    ||d|| <= (1 + omega) ||g||

by Cauchy-Schwarz and the triangle inequality.
"""

from __future__ import annotations

import numpy as np

OMEGA_LOW = 0.001
OMEGA_HIGH = 0.999


class DescentViolation(ArithmeticError):
    """The previous direction was not a descent direction."""


class DegenerateDirection(ArithmeticError):
    """The previous direction has zero norm."""


def omega_adaptive(g, g_prev, d_prev) -> float:
    """Ratio ``|g'd_prev| / (-g_prev'd_prev)`` clipped to ``[0.001, 0.999]``."""
    denom = -float(g_prev @ d_prev)
    if not denom > 0:
        raise DescentViolation(
            f"previous direction is not a descent direction (g'd = {-denom:g})"
        )
    t = abs(float(g @ d_prev)) / denom
    if t <= 0:
        return OMEGA_LOW
    if t >= 1:
        return OMEGA_HIGH
    return t


def beta_new(g, d_prev, omega: float) -> float:
    dnorm = float(np.linalg.norm(d_prev))
    if dnorm == 0:
        raise DegenerateDirection("previous direction has zero norm")
    return omega * float(np.linalg.norm(g)) / dnorm


def direction(g, d_prev=None, beta: float = 0.0):
    if d_prev is None:
        return -g
    return -g + beta * d_prev
