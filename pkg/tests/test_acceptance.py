"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import math
import time

import numpy as np

from betagraph import (
    BetaVector,
    approx_error,
    build_v,
    degree_sequence,
    residual,
    sample_graph,
    solve_mle,
)
from betagraph.inference import table2_compat
from betagraph.montecarlo import LSpec, beta_grid, replication_seed

from conftest import ACCEPTANCE_LINES, TABLE2_BETA, TABLE2_PAREN, cached_report
from oracles import newton_mle


def record(number, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    return ok


def test_criterion_1_foodweb_estimates(foodweb_degrees):
    start = time.perf_counter()
    fit = solve_mle(foodweb_degrees)
    elapsed = time.perf_counter() - start
    gap = np.abs(fit.beta_hat.values - np.array(TABLE2_BETA))
    bad = [(i + 1, round(fit.beta_hat.values[i], 4), TABLE2_BETA[i]) for i in np.flatnonzero(gap > 0.005)]
    ok = fit.converged and not bad and elapsed < 1.0
    record(1, ok, f"max |beta_hat - published| = {gap.max():.4f} (tol 0.005), "
                  f"runtime {elapsed:.3f}s; outside tolerance: {bad}")
    assert fit.converged
    assert elapsed < 1.0
    assert not bad, f"vertices outside +-0.005 of the published estimates: {bad}"


def test_criterion_2_foodweb_compat_values(foodweb_degrees):
    fit = solve_mle(foodweb_degrees)
    root_v = table2_compat(build_v(fit.beta_hat))
    gap = np.abs(root_v - np.array(TABLE2_PAREN))
    ok = bool(gap.max() <= 0.01) and round(root_v[7], 2) == 2.49 and round(root_v[3], 2) == 0.98
    record(2, ok, f"max |sqrt(v_ii) - published| = {gap.max():.4f} (tol 0.01)")
    assert ok


DESK_GRID = [(t, spec) for t in (50, 100, 200) for spec in (LSpec.ZERO, LSpec.LOGLOG)]


def test_criterion_3_desk_scale_coverage():
    start = time.perf_counter()
    failures, lines = [], []
    for t, spec in DESK_GRID:
        r = cached_report(t, spec, 1000)
        cells = {f"({i},{j})": c for (i, j), c in r.pair_coverage.items()}
        cells["ACP"] = r.acp
        for name, c in cells.items():
            if not 0.93 <= c <= 0.97:
                failures.append((t, spec.value, name, c))
        lines.append(f"t={t} {spec.value}: " + ", ".join(f"{k}={100 * v:.1f}" for k, v in cells.items()))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 300
    record(3, ok, f"all cells in [93.0, 97.0]%, {elapsed:.0f}s; " + "; ".join(lines))
    assert not failures, failures
    assert elapsed < 300


def test_criterion_4_nonexistence():
    rates = {t: cached_report(t, LSpec.LOG, 200).nonexistence_rate for t in (50, 100, 200)}
    loglog50 = cached_report(50, LSpec.LOGLOG, 1000).nonexistence_rate
    ok = all(r == 1.0 for r in rates.values()) and loglog50 <= 0.01
    record(4, ok, f"L=log t nonexistence {rates}; L=loglog t at t=50: {100 * loglog50:.1f}%")
    assert all(r == 1.0 for r in rates.values())
    assert loglog50 <= 0.01


def test_criterion_5_approximation_audit():
    closed = []
    for t in (10, 20, 40):
        got = approx_error(build_v(BetaVector(np.zeros(t))))
        want = abs(4 * (2 * t - 3) / ((t - 2) * (2 * t - 2)) - 4 / t)
        closed.append(abs(got - want))
    scaled, ratios = [], []
    for L in (0.0, 0.5, 1.0):
        errs = {}
        for t in (10, 20, 40, 80, 160):
            errs[t] = approx_error(build_v(beta_grid(t, L)))
            scaled.append(errs[t] * (t - 1) ** 2 * math.exp(-6 * L))
        ratios += [errs[t] / errs[2 * t] for t in (40, 80)]
    ok = max(closed) <= 1e-10 and max(scaled) <= 10 and all(3 <= r <= 5.5 for r in ratios)
    record(5, ok, f"closed-form gap {max(closed):.1e}, max scaled error {max(scaled):.3f} (<= 10), "
                  f"ratios {min(ratios):.2f}..{max(ratios):.2f}")
    assert max(closed) <= 1e-10
    assert max(scaled) <= 10
    assert all(3 <= r <= 5.5 for r in ratios)


def _oracle_cases(n_total=100, seed=12345):
    rng = np.random.default_rng(seed)
    sizes = [5, 10, 20]
    cases = []
    while len(cases) < n_total:
        t = sizes[len(cases) % 3]
        beta = BetaVector(rng.uniform(-1.5, 1.5, t))
        d = degree_sequence(sample_graph(beta, int(rng.integers(2**63))))
        if d.values.min() == 0 or d.values.max() == t - 1:
            continue
        ref = newton_mle([int(x) for x in d.values], dps=30)
        if ref is None:
            continue
        cases.append((d, np.array([float(x) for x in ref])))
    return cases


def test_criterion_6_oracle_equivalence():
    worst_gap, worst_res, bad = 0.0, 0.0, []
    for d, ref in _oracle_cases():
        fit = solve_mle(d)
        if not fit.converged:
            bad.append(tuple(d.values))
            continue
        worst_gap = max(worst_gap, float(np.max(np.abs(fit.beta_hat.values - ref))))
        worst_res = max(worst_res, residual(fit.beta_hat, d))
    ok = not bad and worst_gap <= 1e-8 and worst_res <= 1e-8
    record(6, ok, f"100 sequences, max |beta_hat - oracle| = {worst_gap:.1e}, max residual {worst_res:.1e}")
    assert not bad
    assert worst_gap <= 1e-8
    assert worst_res <= 1e-8


def test_criterion_7_normality():
    r = cached_report(100, LSpec.LOGLOG, 1000)
    pooled = r.z_summary(pooled=True)
    inside = float(np.mean(np.abs(r.z_first) < 1.959964))
    ok = (abs(pooled["mean"]) <= 0.1 and 0.93 <= pooled["sd"] <= 1.07
          and pooled["qq_corr"] >= 0.995 and 0.935 <= inside <= 0.965)
    record(7, ok, f"pooled z mean {pooled['mean']:.3f}, sd {pooled['sd']:.3f}, "
                  f"Q-Q corr {pooled['qq_corr']:.4f}, z_1 coverage {100 * inside:.1f}%")
    assert abs(pooled["mean"]) <= 0.1
    assert 0.93 <= pooled["sd"] <= 1.07
    assert pooled["qq_corr"] >= 0.995
    assert 0.935 <= inside <= 0.965


def _median_max_error(t, n_reps=50, seed=777):
    beta = beta_grid(t, 1.0)
    errs = []
    for rep in range(1, n_reps + 1):
        fit = solve_mle(degree_sequence(sample_graph(beta, replication_seed(seed, rep))))
        if fit.converged:
            errs.append(float(np.max(np.abs(fit.beta_hat.values - beta.values))))
    return float(np.median(errs)), len(errs)


def test_criterion_8_rate():
    m50, n50 = _median_max_error(50)
    m200, n200 = _median_max_error(200)
    ratio = m50 / m200
    ok = ratio >= 1.5
    record(8, ok, f"median max error t=50: {m50:.3f} ({n50} fits), t=200: {m200:.3f} ({n200} fits), "
                  f"ratio {ratio:.2f} (>= 1.5)")
    assert ratio >= 1.5
