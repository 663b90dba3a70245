"""Critical exponent of PSL2(Z) weighted by tube potentials around the
golden geodesic, against the exponent of the cyclic group it generates.

    python demos/pressure_of_tube_potentials.py   # a few minutes: one tube integral pass per potential
"""

from spiralis import GroupSpec, TubeBump, Constant, critical_exponent, enumerate_ball
from spiralis.lab import GOLDEN
from spiralis.thermo import delta0_cyclic

orbit = enumerate_ball(GroupSpec("psl2z"), 12.0)
print(f"{len(orbit)} elements with displacement <= 12")
print(f"{'potential':>12} {'delta':>8} {'stderr':>8} {'delta0':>8}")
for F in [Constant(0.0), TubeBump(GOLDEN, 0.25), TubeBump(GOLDEN, 0.5), TubeBump(GOLDEN, 1.0)]:
    fit = critical_exponent(orbit, F, (6.0, 12.0), 0.5)
    print(f"{str(F):>12} {fit.delta:8.4f} {fit.stderr:8.4f} {delta0_cyclic(F, GOLDEN) + 0.0:8.4f}")
