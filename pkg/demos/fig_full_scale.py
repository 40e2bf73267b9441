#!/usr/bin/env python3
"""Full-scale measurement sweep (slow optional job).

The paper-size problem: D=512, K=32 at 20 dB above log2 D, lasso only
(the bound curve is formula-based and exact at any scale, and the
exhaustive ML decoders are out of reach at C(512,32) supports).  Takes a
few minutes.

Writes demos/output/full_scale_sweep.csv.  Run:  python demos/fig_full_scale.py
"""

import math
import os
import time

import sparselimits as sl
from sparselimits.harness import SweepSpec, run_sweep

D, K = 512, 32
SNR = 100.0 * math.log2(D)
base = sl.ProblemConfig(n_samples=1, dimension=D, sparsity=K, snr=SNR, seed=31)
spec = SweepSpec(base=base, sweep_var="normalized_n",
                 sweep_values=(0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0),
                 decoders=("lasso", "reweighted_lasso"), trials=40)

t0 = time.time()
curve = run_sweep(spec, threads=os.cpu_count() or 1)
print(f"D={D}, K={K}, SNR={SNR:.0f}; 40 trials/point; {time.time()-t0:.0f}s\n")
print(f"{'N_n':>5} {'N':>5} {'lasso':>7} {'reweighted':>11} {'bound':>7}")
for j, nn in enumerate(curve.sweep_values):
    n = round(nn * K * math.log2(D / K))
    print(f"{nn:>5} {n:>5} {curve.success['lasso'][j]:>7.2f} "
          f"{curve.success['reweighted_lasso'][j]:>11.2f} "
          f"{curve.bound_success[j]:>7.3f}")

nec = sl.necessary_samples(base)
print(f"\nFano-necessary N: {nec.n_required} "
      f"(N_n = {nec.n_required / (K * math.log2(D / K)):.2f})")

os.makedirs(os.path.join(os.path.dirname(__file__), "output"), exist_ok=True)
out = os.path.join(os.path.dirname(__file__), "output", "full_scale_sweep.csv")
sl.emit_csv(curve, out)
print(f"sweep written to {out}")
