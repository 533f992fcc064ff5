"""Compression-based description length: structured words compress, noise
does not, and statistical tests agree."""

import numpy as np

from collectiva.complexity import (
    complexity_rate_curve,
    estimate_K,
    estimate_K_conditional,
    martin_lof_dip_scan,
    run_battery,
)

words = {
    "zeros": np.zeros(2**15, dtype=np.int64),
    "alternating": np.tile([0, 1], 2**14),
    "period-4": np.tile([0, 1, 1, 0], 2**13),
    "seeded noise": np.random.default_rng(5).integers(0, 2, size=2**15),
}

print(f"{'word':>14} {'n':>6} {'K-hat':>7} {'rate':>7} {'K-hat(x;n)':>10}")
for name, w in words.items():
    est = estimate_K(w)
    cond = estimate_K_conditional(w, w.size)
    print(f"{name:>14} {est.n_bits:>6} {est.k_hat:>7} {est.rate:>7.4f} {cond.k_hat:>10}")

print("\nrate along prefixes of the alternating word:")
for e in complexity_rate_curve(words["alternating"]):
    print(f"  n = {e.n_bits:>6}: rate {e.rate:.4f}")

dips = martin_lof_dip_scan(words["period-4"])
print("\nperiod-4 word dips below n - log2(n) at prefixes:", dips[:4], "...")
print("noise word dips:", martin_lof_dip_scan(words["seeded noise"]))

print("\ntest battery on the alternating word (it is anything but random):")
for r in run_battery(words["alternating"]):
    state = "skip" if r.skipped else ("pass" if r.passed else "FAIL")
    p = "-" if r.p_value is None else f"{r.p_value:.3g}"
    print(f"  {r.name:>16}: p = {p:>9}  {state}")
print("\nsame battery on seeded noise:")
for r in run_battery(words["seeded noise"]):
    state = "skip" if r.skipped else ("pass" if r.passed else "FAIL")
    print(f"  {r.name:>16}: p = {r.p_value:.3f}  {state}")
