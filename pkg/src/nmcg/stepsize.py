"""Convex combination of the two Barzilai-Borwein steps."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

ALPHA_MIN = 1e-10
ALPHA_MAX = 1e10


class StepPair(NamedTuple):
    s: np.ndarray  # x_k - x_{k-1}
    y: np.ndarray  # g_k - g_{k-1}


def _clamp(a: float, lo: float, hi: float) -> float:
    return min(max(a, lo), hi)


def cbb_step(pair: StepPair, alpha_min: float = ALPHA_MIN,
             alpha_max: float = ALPHA_MAX) -> float:
    """Trial step ``mu * a1 + (1 - mu) * a2``, clamped to ``[alpha_min, alpha_max]``.

    ``a1 = s's / s'y`` and ``a2 = s'y / y'y`` are the long and short BB
    steps. The weight is ``mu = K2 / (K1 + K2)`` with secant residuals
    ``K1 = ||a1 y - s||^2`` and ``K2 = ||s / a2 - y||^2``.

    If ``s'y <= 0`` the step falls back to ``||s|| / ||y||`` (1 when
    ``y = 0``).
    """
    if alpha_min > alpha_max:
        raise ValueError("alpha_min must not exceed alpha_max")
    s, y = pair
    sy = float(s @ y)
    if not sy > 0:
        ynorm = float(np.linalg.norm(y))
        alpha = float(np.linalg.norm(s)) / ynorm if ynorm > 0 else 1.0
        return _clamp(alpha, alpha_min, alpha_max)

    a1 = float(s @ s) / sy
    a2 = sy / float(y @ y)
    k1 = float(np.sum((a1 * y - s) ** 2))
    k2 = float(np.sum((s / a2 - y) ** 2))
    if k1 + k2 > 0:
        mu = k2 / (k1 + k2)
        alpha = mu * a1 + (1.0 - mu) * a2
    else:
        alpha = a1
    return _clamp(alpha, alpha_min, alpha_max)


def initial_step(g, alpha_min: float = ALPHA_MIN, alpha_max: float = ALPHA_MAX) -> float:
    """Trial step for the first iteration, ``1 / ||g0||``."""
    gnorm = float(np.linalg.norm(g))
    alpha = 1.0 / gnorm if gnorm > 0 else 1.0
    return _clamp(alpha, alpha_min, alpha_max)
