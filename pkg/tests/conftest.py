import time

import pytest

from nmcg.problems import make_problem, suite_instances
from nmcg.solver import SolverConfig, minimize


@pytest.fixture(scope="session")
def trig_suite():
    """Every suite instance solved once with the trig scheme, traces kept.

    Returns ``(results, seconds)`` where ``results`` maps ``(name, n)`` to
    the solver report.
    """
    cfg = SolverConfig(eta_scheme="trig")
    start = time.perf_counter()
    results = {}
    for name, n in suite_instances():
        results[(name, n)] = minimize(make_problem(name, n), cfg=cfg, record_trace=True)
    return results, time.perf_counter() - start
