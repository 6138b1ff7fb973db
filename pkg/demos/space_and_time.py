"""Peak working words against the budget, and how time grows with n.

    python demos/space_and_time.py [max_exponent]

Inputs are random DNA-like strings.  For each size both variants run once
and report the accountant's peak next to the bound it was checked against.
"""
import sys
import time

import numpy as np

from sprepair import compress

top = int(sys.argv[1]) if len(sys.argv) > 1 else 20
rng = np.random.default_rng(1)
compress(b"ACGT" * 100)  # load the compiled kernels first

print(f"{'n':>9} {'variant':>7} {'peak':>10} {'bound':>10} {'rules':>7} {'lf rounds':>9} {'sec':>6}")
for e in range(14, top + 1, 2):
    n = 1 << e
    data = np.frombuffer(b"ACGT", np.uint8)[rng.integers(0, 4, n)].tobytes()
    for variant in ("fast", "light"):
        t0 = time.perf_counter()
        g = compress(data, variant=variant)
        dt = time.perf_counter() - t0
        st = g.stats
        print(f"{n:>9} {variant:>7} {st.peak_words:>10} {st.bound_words:>10} "
              f"{st.rules:>7} {st.lf_rounds:>9} {dt:>6.2f}")
