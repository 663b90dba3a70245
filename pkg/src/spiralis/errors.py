"""Exception hierarchy shared by all spiralis modules."""


class SpiralisError(Exception):
    """Base class for every error raised by spiralis."""


class ConfigError(SpiralisError, ValueError):
    pass


class NotHyperbolic(SpiralisError, ValueError):
    pass


class InfinityFixed(SpiralisError, ValueError):
    """An integer matrix with c == 0 fixes infinity; conjugate it first."""


class DegenerateRay(SpiralisError, ValueError):
    pass


class BudgetExceeded(SpiralisError, RuntimeError):
    pass


class IncompleteOrbit(SpiralisError, ValueError):
    pass


class DegenerateFit(SpiralisError, ValueError):
    pass


class NonConvergent(SpiralisError, ArithmeticError):
    pass


class QuadratureNonConvergent(NonConvergent):
    pass


class MassBlowup(SpiralisError, ArithmeticError):
    pass


class EmptyShadow(SpiralisError, ValueError):
    pass


class EmptyBall(SpiralisError, ValueError):
    pass


class EmptyOrbitSlice(SpiralisError, ValueError):
    pass


class EmptySeries(SpiralisError, ValueError):
    pass


class PrecisionExhausted(SpiralisError, ArithmeticError):
    pass
