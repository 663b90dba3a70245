"""Running minima of the Khintchine statistic for the two rate functions
powerlog:1 (divergent integral) and powerlog:2 (convergent integral).

    python demos/khintchine_branches.py
"""

from spiralis import GroupSpec
from spiralis.lab import GOLDEN, PowerLog, khintchine_experiment

for s in (1, 2):
    rep = khintchine_experiment(GroupSpec("psl2z"), GOLDEN, PowerLog(s), n_samples=100,
                                H_schedule=(6.0, 8.0, 10.0, 12.0), seed=0)
    print(f"powerlog:{s}  medians {[round(float(m), 4) for m in rep.summary['median']]}  -> {rep.verdict}")
