"""Shadow-lemma ratios and the local dimension of an empirical Patterson
measure for PSL2(Z).

    python demos/shadows_and_dimension.py
"""

import numpy as np

from spiralis import GroupSpec, enumerate_ball
from spiralis.lab import Empirical, sample_boundary
from spiralis.thermo import fitted_band, local_dimension, mohsen_ratios, patterson_empirical

orbit = enumerate_ball(GroupSpec("psl2z"), 12.0)
mu = patterson_empirical(orbit, None, 1.05, 12.0)
band = fitted_band(mohsen_ratios(mu, orbit, (5.0, 9.0)))
print(f"shadow ratios fit in [1/c, c] with c = {band.c:.2f}")

shell = patterson_empirical(orbit, None, 1.0, 12.0, shell_width=1.0)
pts = sample_boundary(Empirical(shell), 30, seed=1)
dims = [local_dimension(shell, x) for x in pts]
print(f"local dimension at 30 sampled points: mean {np.mean(dims):.3f}, sd {np.std(dims):.3f}")
