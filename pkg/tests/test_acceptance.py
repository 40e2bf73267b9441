"""Acceptance gate: one test per headline criterion.

Each test prints a single PASS/FAIL line (with the measured quantities and
elapsed time) before asserting, so a full run always yields a readable
scorecard:

    pytest tests/test_acceptance.py -s

Two criteria fail by design of the underlying mathematics rather than by
implementation defect; the failure messages carry the measured numbers.
See the project notes for the blocking analysis:
  * the SNR-cutoff criterion asks the bound to drop below 1e-3 at 1.1x the
    cutoff, but the bound's large-N floor there is ~0.40 (it reaches 1e-3
    only near 1.7x the cutoff);
  * the reduced-scale measurement-sweep criterion asks both lassos to have
    sub-0.2 success somewhere on N_n in [1, 16], but at 20 dB their
    transitions start below N_n = 1 (success at N_n = 1 is already ~0.3
    and ~0.5).
"""

import itertools
import math
import os
import time
from dataclasses import replace

import numpy as np
import pytest

import sparselimits as sl
from sparselimits.harness import SweepSpec, run_sweep

RNG_SEED = 20260810


def report(name, ok, detail, t0, budget):
    elapsed = time.time() - t0
    verdict = "PASS" if ok else "FAIL"
    line = f"{verdict} - {name}: {detail} [{elapsed:.1f}s / budget {budget:.0f}s]"
    print("\n" + line)
    assert elapsed < budget, f"runtime budget exceeded: {line}"
    assert ok, line


def test_c01_degenerate_correlation():
    t0 = time.time()
    rng = np.random.default_rng(RNG_SEED)
    ok = True
    for _ in range(100):
        d = int(rng.integers(2, 300))
        k = int(rng.integers(1, min(d, 24) + 1))
        c = sl.ProblemConfig(
            n_samples=int(rng.integers(1, 10 ** 6)), dimension=d, sparsity=k,
            snr=float(10 ** rng.uniform(-2, 4)),
            sigma2=float(10 ** rng.uniform(-1, 1)), rho=1.0)
        res = sl.error_bound_linear(c)
        ok &= res.value == 1.0
        ok &= all(sl.f_rho(i, c) < 0.0 for i in range(1, k + 1))
    report("C1 degenerate correlation (rho=1)", ok,
           "100 random configs: f(rho)<0 for all i and bound == 1", t0, 60)


def test_c02_noisy_model_reduction():
    t0 = time.time()
    rng = np.random.default_rng(RNG_SEED + 1)
    worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(2, 600))
        k = int(rng.integers(1, min(d, 64) + 1))
        c = sl.ProblemConfig(
            n_samples=int(rng.integers(1, 10 ** 6)), dimension=d, sparsity=k,
            snr=float(10 ** rng.uniform(-2, 6)), rho=float(rng.uniform(0, 1)),
            sigma2=float(10 ** rng.uniform(-2, 2)), nu=0.0)
        gap = abs(sl.error_bound_noisy(c).value - sl.error_bound_linear(c).value)
        worst = max(worst, gap)
    report("C2 noisy-model reduction at nu=0", worst <= 1e-12,
           f"max |noisy - linear| = {worst:.2e} over 1000 configs (tol 1e-12)",
           t0, 1.0)


def test_c03_snr_cutoff():
    t0 = time.time()
    base = sl.ProblemConfig(n_samples=1, dimension=512, sparsity=32, snr=1.0)
    cut = sl.snr_cutoff(base)
    n_grid = np.unique(np.logspace(0, 8, 80).astype(int))
    below = [sl.error_bound_linear(replace(base, snr=0.9 * cut, n_samples=int(n))).value
             for n in n_grid]
    below_ok = all(v == 1.0 for v in below)
    above = [sl.error_bound_linear(replace(base, snr=1.1 * cut, n_samples=int(n))).value
             for n in n_grid]
    above_ok = min(above) < 1e-3
    detail = (f"cutoff={cut:.3f}; below by 10%: bound==1 for all N<=1e8 "
              f"({'ok' if below_ok else 'violated'}); above by 10%: "
              f"min bound over N<=1e8 = {min(above):.3g} (needs < 1e-3)")
    report("C3 SNR cutoff (K=32, D=512)", below_ok and above_ok, detail, t0, 10)


def test_c04_derivative_identity():
    t0 = time.time()
    from tests_support_random_models import random_discrete_model
    rng = np.random.default_rng(RNG_SEED + 2)
    h = 1e-4
    grid = np.linspace(0.0, 1.0, 101)
    worst_gap, worst_e0, mono_ok = 0.0, 0.0, True
    for _ in range(50):
        m = random_discrete_model(rng, max_k=3, max_alphabet=4, max_theta=3)
        i = int(rng.integers(1, m.k + 1))
        lhs, rhs = sl.derivative_check(m, i, h)
        worst_gap = max(worst_gap, abs(lhs - rhs))
        curve = sl.exponent_curve(m, i, grid)
        worst_e0 = max(worst_e0, abs(curve.values[0]))
        mono_ok &= bool(np.all(np.diff(curve.values) >= -1e-10))
    ok = worst_gap <= 1e-3 and worst_e0 <= 1e-10 and mono_ok
    report("C4 derivative identity on 50 random discrete models", ok,
           f"max |E_o'(0) - I| = {worst_gap:.2e} (tol 1e-3), "
           f"max |E_o(0)| = {worst_e0:.1e}, monotone={mono_ok}", t0, 30)


def test_c05_bound_soundness_desk_scale():
    t0 = time.time()
    trials = 2000
    checks = []
    for rho in (0.0, 0.5):
        for n in (30, 60, 90):
            c = sl.ProblemConfig(n_samples=n, dimension=12, sparsity=2,
                                 snr=200.0, rho=rho)
            errors = 0
            for trial in range(trials):
                ds = sl.make_dataset(replace(c, seed=RNG_SEED + trial))
                out = sl.ml_decode_marginal(ds, c)
                errors += out.support_estimate.indices != ds.support.indices
            p = errors / trials
            se = math.sqrt(p * (1 - p) / trials)
            bound = sl.error_bound_linear(c).value
            checks.append((rho, n, p, bound, p <= bound + 3 * se))
    ok = all(c[-1] for c in checks)
    detail = "; ".join(f"rho={r},N={n}: emp={p:.4f}<=bound {b:.2g}+3se"
                       for r, n, p, b, good in checks)
    report("C5 bound soundness at desk scale", ok, detail, t0, 300)


def test_c06_group_testing_general_bound():
    t0 = time.time()
    model = sl.group_testing_model(2, 0.5)
    bound = sl.error_bound_general(model, 40, 8).value
    rng = np.random.default_rng(RNG_SEED + 3)
    trials, errors = 2000, 0
    for _ in range(trials):
        x = rng.random((40, 8)) < 0.5
        support = tuple(sorted(rng.permutation(8)[:2]))
        y = x[:, support].any(axis=1)
        for cand in itertools.combinations(range(8), 2):
            if cand != support and np.array_equal(x[:, cand].any(axis=1), y):
                errors += 1
                break
    p = errors / trials
    se = math.sqrt(max(p, 1.0 / trials) * (1 - p) / trials)
    report("C6 group-testing general bound", p <= bound + 3 * se,
           f"empirical={p:.5f} <= bound {bound:.5f} + 3se (N=40, 2000 trials)",
           t0, 120)


def test_c07_lasso_kkt():
    t0 = time.time()
    rng = np.random.default_rng(RNG_SEED + 4)
    ok = True
    for _ in range(200):
        n = int(rng.integers(20, 80))
        d = int(rng.integers(5, 60))
        x = rng.standard_normal((n, d)) / math.sqrt(n)
        y = rng.standard_normal(n)
        lam = 10 ** rng.uniform(-3, -0.5)
        # near-singular d ~ n designs at tiny lam need a deep cycle budget
        out = sl.lasso(x, y, min(3, d), sl.LassoSettings(lam=lam, max_iter=200_000))
        if not out.converged:
            ok = False
            continue
        grad = x.T @ (y - x @ out.beta_estimate)
        zero = out.beta_estimate == 0.0
        ok &= bool(np.all(np.abs(grad[zero]) <= lam + 1e-6))
        ok &= bool(np.allclose(grad[~zero],
                               lam * np.sign(out.beta_estimate[~zero]),
                               atol=1e-6))
    report("C7 lasso KKT on 200 random instances", ok,
           "KKT bands: |grad|<=lam+1e-6 (zeros), grad=lam*sign +-1e-6 (actives)",
           t0, 60)


def _fig3a_sweep():
    base = sl.ProblemConfig(n_samples=1, dimension=128, sparsity=8,
                            snr=100.0 * math.log2(128), seed=RNG_SEED)
    spec = SweepSpec(base=base, sweep_var="normalized_n",
                     sweep_values=(1.0, 1.5, 2.0, 4.0, 6.0, 8.0, 12.0, 16.0),
                     decoders=("lasso", "reweighted_lasso"), trials=40)
    return run_sweep(spec)


def test_c08_fig3a_trend_reduced_scale():
    t0 = time.time()
    curve = _fig3a_sweep()
    values = dict(zip(curve.sweep_values, zip(curve.success["lasso"],
                                              curve.success["reweighted_lasso"])))
    dominance_ok = True
    for nn in (2.0, 4.0, 6.0, 8.0):
        s_l, s_r = values[nn]
        idx = curve.sweep_values.index(nn)
        se_l = curve.stderr["lasso"][idx]
        dominance_ok &= s_r >= s_l - 2 * se_l

    def transitions(name):
        s = curve.success[name]
        lows = np.where(s < 0.2)[0]
        highs = np.where(s > 0.8)[0]
        return lows.size > 0 and highs.size > 0 and lows.min() < highs.max()

    trans_l, trans_r = transitions("lasso"), transitions("reweighted_lasso")
    ok = dominance_ok and trans_l and trans_r
    fmt = lambda name: "/".join(f"{v:.2f}" for v in curve.success[name])
    detail = (f"N_n grid {curve.sweep_values}: lasso {fmt('lasso')}, "
              f"reweighted {fmt('reweighted_lasso')}; "
              f"reweighted>=lasso-2se on {{2,4,6,8}}: {dominance_ok}; "
              f"<0.2 -> >0.8 transition inside [1,16]: "
              f"lasso={trans_l}, reweighted={trans_r}")
    report("C8 measurement-sweep trend at reduced scale", ok, detail, t0, 600)


def test_c09_correlation_gap():
    t0 = time.time()
    base = sl.ProblemConfig(n_samples=256, dimension=128, sparsity=8,
                            snr=100.0 * math.log2(128), seed=RNG_SEED + 5)
    spec = SweepSpec(base=base, sweep_var="rho",
                     sweep_values=(0.0, 0.2, 0.4, 0.6, 0.8),
                     decoders=("lasso",), trials=50)
    curve = run_sweep(spec)
    lasso_at_08 = curve.success["lasso"][-1]
    bound_at_08 = curve.bound_success[-1]
    ok = lasso_at_08 < 0.2 and bound_at_08 > 0.9
    report("C9 correlation gap (rho sweep at N_n=8)", ok,
           f"lasso success at rho=0.8: {lasso_at_08:.2f} (< 0.2); "
           f"bound success there: {bound_at_08:.4f} (> 0.9); "
           f"full lasso curve: {np.array2string(curve.success['lasso'], precision=2)}",
           t0, 300)


def test_c10_noisy_data_trend():
    t0 = time.time()
    base = sl.ProblemConfig(n_samples=384, dimension=128, sparsity=8,
                            snr=100.0 * math.log2(128), seed=RNG_SEED + 6)
    spec = SweepSpec(base=base, sweep_var="nu",
                     sweep_values=(0.0, 0.5, 1.0, 2.0, 4.0),
                     decoders=("omp",), trials=40)
    curve = run_sweep(spec)
    s, se = curve.success["omp"], curve.stderr["omp"]
    monotone = all(s[j + 1] <= s[j] + 2 * math.hypot(se[j], se[j + 1])
                   for j in range(len(s) - 1))
    gap_point = any(s[j] < 0.2 and curve.bound_success[j] > 0.8
                    for j in range(len(s)))
    ok = monotone and gap_point
    report("C10 noisy-data trend (nu sweep)", ok,
           f"OMP success {np.array2string(s, precision=2)} vs bound success "
           f"{np.array2string(curve.bound_success, precision=2)}; "
           f"monotone within 2se: {monotone}; "
           f"OMP<0.2 while bound>0.8 at some nu: {gap_point}", t0, 600)


@pytest.mark.skipif(not os.environ.get("SPARSE_LIMITS_FULL_SCALE"),
                    reason="slow optional job; set SPARSE_LIMITS_FULL_SCALE=1")
def test_fig3a_full_scale_optional():
    # The full-size measurement sweep (K=32, D=512, lasso only); the bound
    # curve is formula-based and exact at any scale.
    t0 = time.time()
    base = sl.ProblemConfig(n_samples=1, dimension=512, sparsity=32,
                            snr=100.0 * math.log2(512), seed=RNG_SEED)
    spec = SweepSpec(base=base, sweep_var="normalized_n",
                     sweep_values=(1.0, 2.0, 4.0, 6.0, 8.0),
                     decoders=("lasso",), trials=40)
    curve = run_sweep(spec)
    s = curve.success["lasso"]
    report("optional full-scale measurement sweep", bool(s[0] < 0.2 < s[-1]),
           f"lasso {np.array2string(s, precision=2)}, "
           f"bound {np.array2string(curve.bound_success, precision=3)}", t0, 1800)
