#!/usr/bin/env python3
"""Benchmark practical decoders against the information-theoretic limit.

Reduced-scale version of the paper-style comparison (D=128, K=8, high
SNR): sweep the normalized sample count, run lasso and reweighted lasso
over seeded trials, and put the bound's success curve next to the
empirical frequencies.  Writes the sweep to demos/output/measurement_sweep.csv
(the format the plots component consumes) and prints the table.

Run:  python demos/decoder_benchmark.py
"""

import math
import os

import sparselimits as sl
from sparselimits.harness import SweepSpec, run_sweep

D, K = 128, 8
SNR = 100.0 * math.log2(D)
base = sl.ProblemConfig(n_samples=1, dimension=D, sparsity=K, snr=SNR, seed=11)
spec = SweepSpec(base=base, sweep_var="normalized_n",
                 sweep_values=(1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0),
                 decoders=("lasso", "reweighted_lasso"), trials=40)

print(f"D={D}, K={K}, SNR={SNR:.0f}, 40 trials per point; "
      f"penalty rule 2*sqrt(2 ln D)/sqrt(SNR) = "
      f"{sl.default_lasso_lambda(D, SNR):.4f}\n")
curve = run_sweep(spec, threads=os.cpu_count() or 1)

print(f"{'N_n':>5} {'N':>5} {'lasso':>7} {'reweighted':>11} {'bound':>7}")
for j, nn in enumerate(curve.sweep_values):
    n = round(nn * K * math.log2(D / K))
    print(f"{nn:>5} {n:>5} {curve.success['lasso'][j]:>7.2f} "
          f"{curve.success['reweighted_lasso'][j]:>11.2f} "
          f"{curve.bound_success[j]:>7.3f}")

nec = sl.necessary_samples(sl.ProblemConfig(n_samples=1, dimension=D,
                                            sparsity=K, snr=SNR))
print(f"\nFano-necessary N: {nec.n_required} "
      f"(N_n = {nec.n_required / (K * math.log2(D / K)):.2f})")

os.makedirs(os.path.join(os.path.dirname(__file__), "output"), exist_ok=True)
out = os.path.join(os.path.dirname(__file__), "output", "measurement_sweep.csv")
sl.emit_csv(curve, out)
print(f"sweep written to {out}")
