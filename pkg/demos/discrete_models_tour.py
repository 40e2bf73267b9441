#!/usr/bin/env python3
"""The general machinery on a finite-alphabet example: group testing.

Items are included in pooled tests independently with probability p, and
a test is positive iff it contains at least one of the K defective items.
This is a nonlinear observation model, yet the same exponent/information
quantities govern recovery:

  * E_o(delta), computed by exact enumeration, with its minimum-over-delta
    error bound for finite N and D,
  * the conditional mutual information, which equals the slope of E_o at
    delta = 0 (checked numerically below),
  * a Monte Carlo run of the exact ML decoder against the bound.

Run:  python demos/discrete_models_tour.py
"""

import itertools

import numpy as np

import sparselimits as sl

K, D, P, N = 2, 8, 0.5, 40
model = sl.group_testing_model(K, P)
print(f"Group testing: K={K} defectives among D={D} items, inclusion p={P}\n")

print("1. Error exponent E_o(delta) for one mistaken item (i=1)")
curve = sl.exponent_curve(model, 1, np.linspace(0, 1, 6))
for d, v in zip(curve.deltas, curve.values):
    print(f"   delta={d:.1f}: E_o = {v:.4f} bits")

print("\n2. Slope at zero vs mutual information, i = 1 and 2")
for i in (1, 2):
    lhs, rhs = sl.derivative_check(model, i, 1e-4)
    print(f"   i={i}: E_o'(0) = {lhs:.6f}, I(X_1; Y | X_2) = {rhs:.6f} bits")

print(f"\n3. Finite-size bound at N={N} tests, D={D} items")
bound = sl.error_bound_general(model, N, D)
weak = sl.error_bound_general(model, N, D, weak=True)
print(f"   P(error) <= {bound.value:.3e}  (delta-weighted set penalty)")
print(f"   P(error) <= {weak.value:.3e}  (weaker unweighted variant)")

print("\n4. 2000-trial exact ML simulation against the bound")
rng = np.random.default_rng(7)
errors = 0
trials = 2000
for _ in range(trials):
    x = rng.random((N, D)) < P
    support = tuple(sorted(rng.permutation(D)[:K]))
    y = x[:, support].any(axis=1)
    for cand in itertools.combinations(range(D), K):
        if cand != support and np.array_equal(x[:, cand].any(axis=1), y):
            errors += 1
            break
print(f"   empirical P(error) = {errors / trials:.5f} <= bound {bound.value:.5f}")

print("\n5. Sample complexity from the information side")
targets = [sl.log2_binomial(D - K + i, i) for i in (1, 2)]
infos = [sl.mutual_information(model, i) for i in (1, 2)]
need = max(t / v for t, v in zip(targets, infos))
print(f"   necessary tests: N > max_i log2 C(D-K+i, i) / I_i = {need:.1f}")
