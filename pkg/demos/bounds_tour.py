#!/usr/bin/env python3
"""A tour of the closed-form recovery limits for the sparse linear model.

Walks through the central objects one at a time:

  1. the error-probability upper bound as the sample count N grows,
  2. how column correlation rho stretches the required N,
  3. the SNR cutoff below which no N ever helps,
  4. what feature noise (observing Z = X + V) costs,
  5. necessary vs sufficient sample counts.

Run:  python demos/bounds_tour.py
"""

import math
from dataclasses import replace

import numpy as np

import sparselimits as sl

D, K = 512, 32
SNR = 100.0 * math.log2(D)   # "20 dB above log2 D", the paper-style regime
base = sl.ProblemConfig(n_samples=1, dimension=D, sparsity=K, snr=SNR)

print(f"Problem: D={D} variables, K={K} salient, SNR={SNR:.0f} (linear)\n")

print("1. Error bound vs number of samples N (rho = 0)")
print(f"   {'N':>6} {'N_n':>5} {'P(error) bound':>15} {'success':>9}")
for nn in (1, 2, 3, 4, 6, 8):
    n = round(nn * K * math.log2(D / K))
    res = sl.error_bound_linear(replace(base, n_samples=n))
    print(f"   {n:>6} {nn:>5} {res.value:>15.3e} {1 - res.value:>9.4f}")

print("\n2. Correlated columns: the same bound at N_n = 4")
n4 = round(4 * K * math.log2(D / K))
for rho in (0.0, 0.3, 0.6, 0.9, 1.0):
    res = sl.error_bound_linear(replace(base, n_samples=n4, rho=rho))
    tag = " (clamped: recovery impossible)" if res.clamped else ""
    print(f"   rho={rho:.1f}: bound={res.value:.3e}{tag}")

print("\n3. SNR cutoff: below it the bound is stuck at 1 for every N")
cut = sl.snr_cutoff(base)
print(f"   cutoff = {cut:.3f} (linear scale, {10 * math.log10(cut):.1f} dB)")
for mult in (0.9, 1.1, 2.0, 4.0):
    res = sl.error_bound_linear(replace(base, snr=mult * cut, n_samples=10 ** 8))
    print(f"   SNR = {mult:.1f} x cutoff: bound at N=1e8 is {res.value:.3g}")

print("\n4. Noisy features: Z = X + V with per-entry variance nu/N")
for nu in (0.0, 0.5, 1.0, 2.0, 4.0):
    res = sl.error_bound_noisy(replace(base, n_samples=n4, nu=nu))
    print(f"   nu={nu:.1f}: bound={res.value:.3e}")

print("\n5. Sample complexity at this SNR")
nec = sl.necessary_samples(base)
suf = sl.sufficient_samples(base, 1e-3)
print(f"   necessary (Fano): N >= {nec.n_required} (binding error count "
      f"i={nec.binding_i})")
print(f"   sufficient (bound <= 1e-3): N >= {suf.n_required} (binding "
      f"i={suf.binding_i})")
print(f"   normalized: {nec.n_required / (K * math.log2(D / K)):.2f} and "
      f"{suf.n_required / (K * math.log2(D / K)):.2f} in N_n units")

print("\n6. Partial recovery: tolerating up to half the support wrong")
res_full = sl.error_bound_linear(replace(base, n_samples=n4, snr=0.6 * SNR))
res_half = sl.partial_recovery_bound(replace(base, n_samples=n4, snr=0.6 * SNR), 0.5)
print(f"   exact-recovery bound:     {res_full.value:.3e}")
print(f"   >= 16-errors bound:       {res_half.value:.3e}")
