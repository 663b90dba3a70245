"""Numerical experiments on Fuchsian groups with potentials.

Modules:

- ``hypcore``: geometry of the upper half-plane and the hyperboloid.
- ``groups``: PSL2(Z), congruence and quaternion lattices, orbit balls,
  quadratic irrationals.
- ``thermo``: potentials, weighted orbit sums, critical exponents,
  Gibbs cocycles, Patterson-type measures, dimensions.
- ``lab``: Khintchine-type approximation, tube penetrations, log law,
  continued fractions.
- ``cli``: the ``spiralis`` command.
"""

from .errors import SpiralisError
from .groups import GroupSpec, enumerate_ball
from .hypcore import HPoint, Isometry
from .thermo import Constant, TubeBump, critical_exponent, parse_potential

__version__ = "0.1.0"

__all__ = ["SpiralisError", "GroupSpec", "enumerate_ball", "HPoint", "Isometry", "Constant",
           "TubeBump", "critical_exponent", "parse_potential", "__version__"]
