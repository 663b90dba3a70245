"""Longest runs of 1's in continued fractions of random x, rescaled so
that the logarithm law predicts 1.

    python demos/log_law_from_continued_fractions.py [samples]
"""

import sys

import numpy as np

from spiralis.lab import LN_PHI, cf_sample, longest_run

n = int(sys.argv[1]) if len(sys.argv) > 1 else 100
marks = [1_000, 10_000, 100_000]
ratios = np.empty((n, len(marks)))
for i in range(n):
    digits, _ = cf_sample(marks[-1], seed=0, index=i)
    for j, m in enumerate(marks):
        ratios[i, j] = longest_run(digits[:m]) * 2 * LN_PHI / np.log(m)

for m, med in zip(marks, np.median(ratios, axis=0)):
    print(f"n = {m:>7}: median rescaled run {med:.3f}")
