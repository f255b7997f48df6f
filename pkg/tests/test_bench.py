import csv
import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmcg.bench import (
    PROFILE_HEADER,
    RUN_HEADER,
    ProfileTable,
    SOLVER_PRESETS,
    performance_ratios,
    profile,
    profile_paths,
    run_suite,
    tau_grid,
)

from oracles import brute_force_profile


def table(values, failed=None):
    values = np.asarray(values, float)
    failed = np.zeros(values.shape, bool) if failed is None else np.asarray(failed)
    return ProfileTable("iterations", [("p", i) for i in range(values.shape[0])],
                        [f"s{j}" for j in range(values.shape[1])], values, failed)


def test_ratio_examples():
    assert np.array_equal(performance_ratios(table([[10, 20, 40]])), [[1, 2, 4]])
    assert np.array_equal(performance_ratios(table([[10, 20], [30, 15]])), [[1, 2], [2, 1]])
    r = performance_ratios(table([[10, 20]], [[False, True]]))
    assert r[0, 0] == 1 and r[0, 1] == np.inf


def test_zero_best_value():
    r = performance_ratios(table([[0.0, 0.0, 3.0]]))
    assert list(r[0]) == [1.0, 1.0, np.inf]


def test_all_failed_row_is_excluded(caplog):
    with caplog.at_level(logging.WARNING):
        r = performance_ratios(table([[1, 2], [5, 5]], [[False, False], [True, True]]))
    assert r.shape == (1, 2)
    assert "every solver failed" in caplog.text


def test_profile_examples():
    r = np.array([[1, 2], [2, 1], [4, np.inf]])
    p = profile(r, [1, 2, 4, 10])
    assert np.array_equal(p, [[1 / 3, 2 / 3, 1, 1], [1 / 3, 2 / 3, 2 / 3, 2 / 3]])


def test_profile_rejects_bad_grid():
    with pytest.raises(ValueError):
        profile(np.ones((2, 2)), [2, 1])
    with pytest.raises(ValueError):
        profile(np.ones((2, 2)), [0.5, 1])


def test_tau_grid_contains_breakpoints():
    r = np.array([[1, 2.5], [3.25, np.inf]])
    grid = tau_grid(r)
    assert {1.0, 2.5, 3.25, 10.0} <= set(grid)
    assert np.all(np.diff(grid) > 0)


def test_profile_matches_brute_force_on_random_tables():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        vals = rng.integers(1, 50, size=(5, 4)).astype(float)
        failed = rng.random((5, 4)) < 0.2
        r = performance_ratios(table(vals, failed))
        taus = tau_grid(r)
        assert np.array_equal(profile(r, taus), brute_force_profile(vals, failed, taus))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.floats(0.5, 1e3), min_size=3, max_size=3), min_size=1, max_size=6))
def test_profile_properties(rows):
    r = performance_ratios(table(rows))
    p = profile(r, tau_grid(r))
    assert np.all((p >= 0) & (p <= 1))
    assert np.all(np.diff(p, axis=1) >= 0)
    # someone is best on every problem
    assert p[:, 0].sum() >= 1 - 1e-12
    assert np.allclose(p[:, -1], 1.0)


def test_run_suite_outputs(tmp_path):
    out = tmp_path / "runs.csv"
    prof = tmp_path / "prof.csv"
    instances = [("fig1_demo", 10), ("extended_rosenbrock", 10)]
    tables, records = run_suite(SOLVER_PRESETS, instances, out_path=out, profile_path=prof)
    assert len(records) == 6
    assert set(tables) == {"iterations", "function_evals", "gradient_evals", "time"}
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == RUN_HEADER and len(rows) == 7
    for metric, path in profile_paths(prof, list(tables)).items():
        with open(path) as fh:
            assert tuple(next(csv.reader(fh))) == PROFILE_HEADER
        assert path.name == f"prof_{metric}.csv"

    again, records2 = run_suite(SOLVER_PRESETS, instances, metrics=["iterations"])
    strip = lambda rs: [(r.problem, r.n, r.solver, r.status, r.iters, r.fevals, r.gevals) for r in rs]
    assert strip(records) == strip(records2)
    assert np.array_equal(again["iterations"].values, tables["iterations"].values)


def test_run_suite_parallel_matches_sequential():
    instances = [("fig1_demo", 10), ("extended_beale", 10)]
    seq, a = run_suite(SOLVER_PRESETS, instances, metrics=["function_evals"])
    par, b = run_suite(SOLVER_PRESETS, instances, metrics=["function_evals"], workers=2)
    assert np.array_equal(seq["function_evals"].values, par["function_evals"].values)


def test_run_suite_validation():
    with pytest.raises(ValueError):
        run_suite({}, [("fig1_demo", 10)])
    with pytest.raises(ValueError):
        run_suite(SOLVER_PRESETS, [("fig1_demo", 10)], metrics=["speed"])


def test_single_metric_profile_path(tmp_path):
    assert profile_paths(tmp_path / "p.csv", ["time"]) == {"time": tmp_path / "p.csv"}
