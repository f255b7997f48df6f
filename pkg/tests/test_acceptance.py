"""Acceptance criteria, one or more tests each.

Every test prints a single ``[ACCEPT n] PASS|FAIL`` line before asserting,
so ``pytest tests/test_acceptance.py -s`` gives a readable scorecard.
"""

import csv
import time
from fractions import Fraction

import numpy as np
import pytest

from nmcg.core import DifferentiableProblem, check_gradient
from nmcg.bench import ProfileTable, performance_ratios, profile, tau_grid
from nmcg.nmf import anls, gradients, nmf_objective
from nmcg import nmf as nmf_module
from nmcg.nonmonotone import eta_ahookhosh, eta_amini, eta_trig
from nmcg.problems import lipschitz_constant, make_problem, problem_names
from nmcg.solver import SolverConfig, minimize, write_trace_csv
from nmcg.stepsize import StepPair, cbb_step

from oracles import brute_force_profile

pytestmark = pytest.mark.slow

CFG = SolverConfig()


def verdict(criterion, ok, detail=""):
    print(f"\n[ACCEPT {criterion}] {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, detail


def test_1_direction_bounds(trig_suite):
    results, seconds = trig_suite
    bad, literal = [], 0
    for key, rep in results.items():
        for t in rep.trace:
            gg = t.gnorm**2
            # relative slack of 1e-10 on each bound, applied in the loosening direction
            if not (t.gtd <= -(1 - t.omega) * gg * (1 - 1e-10)
                    and t.dnorm <= (1 + t.omega) * t.gnorm * (1 + 1e-10)):
                bad.append((key, t.k))
            literal += t.gtd > -(1 - t.omega) * gg * (1 + 1e-10)
    iters = sum(len(r.trace) for r in results.values())
    verdict("1", not bad and seconds <= 300,
            f"{iters} iterations over {len(results)} instances, {len(bad)} violations "
            f"({literal} steps within 1e-10 of the descent bound), {seconds:.1f}s")


def test_2_monotone_envelope(trig_suite):
    results, _ = trig_suite
    bad = 0
    for rep in results.values():
        prev = np.inf
        for t in rep.trace:
            tol = 1e-12 * max(1.0, abs(t.flk))
            if not (t.f <= t.Rk + tol and t.Rk <= t.flk + tol and t.flk <= prev + tol):
                bad += 1
            prev = t.flk
    verdict("2", bad == 0, f"{bad} envelope violations")


def test_3_step_lower_bound(trig_suite):
    results, _ = trig_suite
    checked, bad = 0, 0
    for (name, n), rep in results.items():
        if name not in ("fig1_demo", "quadratic_qf1"):
            continue
        L = lipschitz_constant(name, n)
        for t in rep.trace:
            lam = min(t.alpha0 * CFG.rho,
                      2 * (1 - t.omega) * CFG.rho * (1 - CFG.gamma) / (L * (1 + t.omega) ** 2))
            checked += 1
            bad += t.alpha < lam - 1e-12
    # the 41-dimensional demo instance as well
    rep = minimize(make_problem("fig1_demo", 41), record_trace=True)
    for t in rep.trace:
        lam = min(t.alpha0 * CFG.rho, 2 * (1 - t.omega) * CFG.rho * (1 - CFG.gamma) / (2 * (1 + t.omega) ** 2))
        checked += 1
        bad += t.alpha < lam - 1e-12
    verdict("3", checked > 0 and bad == 0, f"{checked} steps checked, {bad} below the bound")


def test_4_convergence_rate(trig_suite):
    results, seconds = trig_suite
    solved = sum(rep.converged for rep in results.values())
    rate = solved / len(results)
    demo = minimize(make_problem("fig1_demo", 41))
    target = np.ones(41)
    target[0] = 5.0
    demo_ok = demo.converged and demo.final_value <= 1e-10 and np.allclose(demo.final_point, target, atol=1e-5)
    failed = [f"{k[0]}/{k[1]}" for k, r in results.items() if not r.converged]
    verdict("4", rate >= 0.90 and demo_ok and seconds <= 600,
            f"{solved}/{len(results)} = {rate:.1%} converged (unsolved: {', '.join(failed) or 'none'}); "
            f"fig1_demo f={demo.final_value:.2e}; {seconds:.1f}s")


def test_5_eta_values():
    seq = [eta_ahookhosh(k, 0.15) for k in range(60)]
    eta = 0.95
    for _ in range(200):
        eta = eta_amini(eta, 0.5)
    checks = {
        "trig(0)": eta_trig(0.0) == 0.01,
        "trig(1)": abs(eta_trig(1.0) - 0.832724) <= 1e-6,
        "ahookhosh eta_1": abs(seq[1] - 0.075) <= 1e-15,
        "ahookhosh limit": all(abs(e - 0.1) <= 1e-6 for e in seq[25:]),
        "amini floor": eta == 0.5,
    }
    verdict("5", all(checks.values()), ", ".join(f"{k}={'ok' if v else 'bad'}" for k, v in checks.items()))


def test_6_eta_trace_on_demo(tmp_path):
    rep = minimize(make_problem("fig1_demo", 41), cfg=SolverConfig(eta_scheme="trig"), record_trace=True)
    path = tmp_path / "fig1_trace.csv"
    write_trace_csv(rep.trace, path)
    with open(path) as fh:
        etas = [float(row["eta"]) for row in csv.DictReader(fh)]
    ok = etas[0] >= 0.90 and etas[-1] <= 0.05 and all(0.01 <= e <= 0.96 for e in etas)
    verdict("6", ok, f"eta first={etas[0]:.4f} last={etas[-1]:.4f} over {len(etas)} rows")


def test_7_cbb_exactness():
    s, y = np.array([1.0, 1.0]), np.array([1.0, 2.0])
    value = cbb_step(StepPair(s, y))
    exact = float(Fraction(68, 105))
    scale_ok = True
    for c in (1e-6, 1.0, 1e6):
        scaled = cbb_step(StepPair(c * s, c * y))
        scale_ok &= abs(scaled - value) <= 1e-10 * abs(value)
    verdict("7", abs(value - exact) <= 1e-12 and scale_ok, f"cbb={value!r}")


def test_8_profile_oracle():
    rng = np.random.default_rng(8)
    mismatches = 0
    for _ in range(100):
        vals = rng.integers(1, 100, size=(5, 4)).astype(float)
        failed = rng.random((5, 4)) < 0.15
        table = ProfileTable("iterations", [("p", i) for i in range(5)], list("abcd"), vals, failed)
        r = performance_ratios(table)
        taus = tau_grid(r)
        mismatches += not np.array_equal(profile(r, taus), brute_force_profile(vals, failed, taus))
    verdict("8", mismatches == 0, f"{mismatches}/100 tables differ")


@pytest.fixture(scope="module")
def nmf_runs(monkeypatch_module):
    """Ten 100x50 rank-5 factorizations; tracks the smallest entry ever produced."""
    smallest = [np.inf]

    def watch(fn):
        def wrapped(*args, **kwargs):
            res = fn(*args, **kwargs)
            smallest[0] = min(smallest[0], float(res.X.min()))
            return res
        return wrapped

    monkeypatch_module.setattr(nmf_module, "solve_subproblem_W", watch(nmf_module.solve_subproblem_W))
    monkeypatch_module.setattr(nmf_module, "solve_subproblem_H", watch(nmf_module.solve_subproblem_H))
    start = time.perf_counter()
    runs = []
    for seed in range(10):
        V = np.random.default_rng(10_000 + seed).random((100, 50))
        W, H, rep = anls(V, 5, 1e-4, seed=seed)
        smallest[0] = min(smallest[0], float(W.min()), float(H.min()))
        runs.append(rep)
    return runs, time.perf_counter() - start, smallest[0]


@pytest.fixture(scope="module")
def monkeypatch_module():
    mp = pytest.MonkeyPatch()
    yield mp
    mp.undo()


def test_9_nmf_error_band(nmf_runs):
    runs, _, _ = nmf_runs
    err = float(np.mean([r.error for r in runs]))
    verdict("9 error", 0.08 <= err <= 0.16, f"mean Error {err:.4f}, required [0.08, 0.16]")


def test_9_nmf_outer_iterations(nmf_runs):
    runs, _, _ = nmf_runs
    it = float(np.mean([r.iter for r in runs]))
    verdict("9 iter", it <= 60, f"mean outer Iter {it:.1f}, required <= 60")


def test_9_nmf_monotone_nonnegative_runtime(nmf_runs):
    runs, seconds, smallest = nmf_runs
    monotone = all(b <= a + 1e-12 * (1 + abs(a))
                   for r in runs for a, b in zip(r.objective_history, r.objective_history[1:]))
    verdict("9 invariants", monotone and smallest >= 0 and seconds <= 120,
            f"objective nonincreasing={monotone}, min entry={smallest:.3g}, {seconds:.1f}s")


def test_9_nmf_exact_rank_recovery():
    rng = np.random.default_rng(33)
    V = rng.random((20, 3)) @ rng.random((3, 20))
    _, _, rep = anls(V, 3, 1e-4, seed=0)
    verdict("9 exact rank", rep.error <= 1e-3, f"Error {rep.error:.2e} after {rep.iter} sweeps")


def test_10_gradient_checks():
    worst = {}
    rng = np.random.default_rng(10)
    for name in problem_names():
        p = make_problem(name, 10)
        worst[name] = 0.0
        for _ in range(5):
            x = rng.uniform(-2, 2, 10)
            worst[name] = max(worst[name], check_gradient(p, x, 1e-6 * max(1.0, np.abs(x).max())))
    for label in ("nmf_W", "nmf_H"):
        worst[label] = 0.0
    for _ in range(5):
        V, W, H = rng.random((6, 4)), rng.random((6, 2)), rng.random((2, 4))
        pw = DifferentiableProblem("nmf_W", 12, lambda w: nmf_objective(V, w.reshape(6, 2), H),
                                   lambda w: gradients(V, w.reshape(6, 2), H)[0].ravel(), W.ravel())
        ph = DifferentiableProblem("nmf_H", 8, lambda h: nmf_objective(V, W, h.reshape(2, 4)),
                                   lambda h: gradients(V, W, h.reshape(2, 4))[1].ravel(), H.ravel())
        worst["nmf_W"] = max(worst["nmf_W"], check_gradient(pw, pw.initial_point))
        worst["nmf_H"] = max(worst["nmf_H"], check_gradient(ph, ph.initial_point))
    over = {k: v for k, v in worst.items() if v > 1e-5}
    verdict("10", not over, f"{len(worst)} gradients, worst {max(worst.values()):.1e}, over tolerance: {over or 'none'}")
