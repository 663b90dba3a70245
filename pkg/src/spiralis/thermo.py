"""Potentials, orbit sums, Gibbs cocycles and Patterson-type measures.

Weights attached to an orbit element g are e^{f(g)} with
f(g) = integral of the potential along the segment [x0, g x0].  Tube
potentials are piecewise smooth along geodesics, so integrals are computed
by splitting at every kink and applying Gauss-Legendre on each piece;
this makes them exact to rounding and independent of the step size.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from . import _tube
from .errors import (ConfigError, DegenerateFit, EmptyBall, EmptyShadow,
                     IncompleteOrbit, MassBlowup, NonConvergent, QuadratureNonConvergent)
from .groups import GroupSpec, Orbit, OrbitElement, axis_orbit, enumerate_ball
from .hypcore import (X0, GeodesicLine, HPoint, Isometry, as_boundary, boundary_angle,
                      closest_point, hdist, hpoint_vec, mink, matrix_normal, ray_frame, ray_point, to_hyperboloid,
                      translation_length, _require_hyperbolic)

PANEL = 0.25  # sub-interval width of the bulk kernel; accuracy does not depend on it
RADIUS_TOL = 1e-9


# --- potentials ----------------------------------------------------------

class Potential:
    """A Gamma-invariant function of the footpoint, integrated along geodesics."""

    @property
    def bound(self) -> float:
        raise NotImplementedError

    def value(self, p: HPoint) -> float:
        raise NotImplementedError

    def terms(self) -> tuple:
        return (self,)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Constant(float(other))
        return Sum(self.terms() + other.terms())

    __radd__ = __add__

    @property
    def constant_part(self) -> float:
        return sum(t.c for t in self.terms() if isinstance(t, Constant))

    @property
    def tubes(self) -> tuple:
        return tuple(t for t in self.terms() if isinstance(t, TubeBump))


@dataclass(frozen=True)
class Constant(Potential):
    c: float = 0.0

    @property
    def bound(self):
        return abs(self.c)

    def value(self, p):
        return self.c

    def __str__(self):
        return "zero" if self.c == 0 else f"const:{self.c:g}"


@dataclass(frozen=True)
class TubeBump(Potential):
    """F(v) = -K min(d(footpoint, Gamma.axis(gamma0)), 1), for PSL2(Z)."""

    gamma0: Isometry
    K: float
    group: GroupSpec = GroupSpec("psl2z")

    def __post_init__(self):
        if self.group.kind != "psl2z":
            raise ConfigError("tube potentials are implemented for psl2z only")
        if not self.gamma0.integral:
            raise ConfigError("tube axis must come from an integer matrix")
        _require_hyperbolic(self.gamma0)

    @property
    def bound(self):
        return abs(self.K)

    @property
    def index(self) -> TubeIndex:
        return tube_index(self.gamma0)

    def distance(self, p: HPoint) -> float:
        return float(self.index.capped_distance(np.array([p.u]), np.array([p.v]))[0])

    def value(self, p):
        return -self.K * self.distance(p)

    def __str__(self):
        return f"tube:{self.K:g}"


@dataclass(frozen=True)
class Sum(Potential):
    parts: tuple = ()

    def terms(self):
        out = ()
        for t in self.parts:
            out += t.terms()
        return out

    @property
    def bound(self):
        return sum(t.bound for t in self.terms())

    def value(self, p):
        return sum(t.value(p) for t in self.terms())

    def __str__(self):
        return "+".join(str(t) for t in self.terms())


def parse_potential(text: str, gamma0: Isometry | None = None) -> Potential:
    text = text.strip().lower()
    try:
        if text in ("zero", "0"):
            return Constant(0.0)
        if text.startswith("const:"):
            return Constant(float(text.split(":", 1)[1]))
        if text.startswith("tube:"):
            if gamma0 is None:
                raise ConfigError("tube potential needs gamma0")
            return TubeBump(gamma0, float(text.split(":", 1)[1]))
    except ValueError as exc:
        raise ConfigError(f"bad potential {text!r}") from exc
    raise ConfigError(f"bad potential {text!r}")


# --- tube index ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TubeIndex:
    """Lifts of the axis that come within reach of the fundamental domain."""

    gamma0: Isometry
    normals: np.ndarray  # (k, 3) in light-cone coordinates
    reach: float
    conj: np.ndarray  # (k, 4) integer conjugates of gamma0 whose axes are the lifts

    def capped_distance(self, u, v) -> np.ndarray:
        P = _tube.to_lightcone(to_hyperboloid(u, v)).reshape(-1, 3)
        R = _tube.reduce_points(np.ascontiguousarray(P))
        n = self.normals
        f = -0.5 * (R[:, None, 0] * n[None, :, 1] + R[:, None, 1] * n[None, :, 0]) \
            + R[:, None, 2] * n[None, :, 2]
        d = np.arcsinh(np.abs(f)).min(axis=1, initial=_tube.CAP)
        return np.minimum(d, _tube.CAP)


@lru_cache(maxsize=32)
def tube_index(gamma0: Isometry, panel: float = PANEL) -> TubeIndex:
    # lifts have Euclidean radius <= sqrt(tr^2 - 4)/2, so points of the
    # domain above height r_max e^{reach} are at distance > reach from all
    reach = _tube.CAP + panel
    r_max = math.sqrt(float(gamma0.trace) ** 2 - 4) / 2
    top = max(r_max * math.exp(reach), 1.0)
    corner = hdist(X0, HPoint(0.5, top))
    axes = axis_orbit(GroupSpec("psl2z"), gamma0, corner + reach + 0.5)
    n = matrix_normal(*(axes.conj[:, i].astype(float) for i in range(4)))
    return TubeIndex(gamma0, np.ascontiguousarray(_tube.to_lightcone(n)), reach, axes.conj)


# --- line integrals ------------------------------------------------------

def _frames(P: np.ndarray, Y: np.ndarray):
    cd = np.maximum(-mink(P, Y), 1.0)
    d = np.arccosh(cd)
    sh = np.sinh(d)
    with np.errstate(invalid="ignore", divide="ignore"):
        W = (Y - cd[:, None] * P) / sh[:, None]
    W[d == 0] = np.array([0.0, 1.0, 0.0])
    return W, d


def _tube_integrals(index: TubeIndex, P, W, lengths, width=PANEL) -> np.ndarray:
    _tube.configure_threads()
    return _tube.capped_distance_integrals(
        np.ascontiguousarray(_tube.to_lightcone(P)), np.ascontiguousarray(_tube.to_lightcone(W)),
        np.ascontiguousarray(lengths, dtype=float), index.normals, float(width),
        _tube.GAUSS_NODES, _tube.GAUSS_WEIGHTS)


def segment_integrals(F: Potential, P, W, lengths, width=PANEL) -> np.ndarray:
    """Integrals of F along segments s -> cosh(s) P + sinh(s) W, 0 <= s <= length."""
    lengths = np.asarray(lengths, dtype=float)
    out = F.constant_part * lengths
    for tube in F.tubes:
        out = out - tube.K * _tube_integrals(tube.index, P, W, lengths, width)
    return out


def line_integral(F: Potential, x: HPoint, y: HPoint, step: float = 1e-2,
                  tol: float = 1e-6) -> float:
    """Integral of F along the geodesic segment from x to y.

    The panel width is ``step``; the result is recomputed at step/2 and
    QuadratureNonConvergent is raised when the two differ by more than tol.
    """
    if x == y:
        return 0.0
    P = hpoint_vec(x)[None, :]
    W, d = _frames(P, hpoint_vec(y)[None, :])
    coarse = segment_integrals(F, P, W, d, step)[0]
    if not F.tubes:
        return float(coarse)
    fine = segment_integrals(F, P, W, d, step / 2)[0]
    if abs(fine - coarse) > tol:
        raise QuadratureNonConvergent(f"halving changed integral by {abs(fine - coarse):.3g}")
    return float(fine)


def ray_integral(F: Potential, x: HPoint, xi, T: float) -> float:
    """Integral of F along the ray from x toward xi, up to arclength T."""
    P, W = ray_frame(x, xi)
    return float(segment_integrals(F, P[None, :], W[None, :], np.array([T]))[0])


_ORBIT_CACHE: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def orbit_integrals(F: Potential, orbit: Orbit) -> np.ndarray:
    """f(g) = integral of F over [x0, g x0] for every element of the orbit."""
    out = F.constant_part * orbit.displacement
    if not F.tubes:
        return out
    if orbit.group is not None and orbit.group.kind != "psl2z":
        raise ConfigError("tube potentials are implemented for psl2z only")
    cache = _ORBIT_CACHE.setdefault(orbit, {})
    for tube in F.tubes:
        key = tube.gamma0
        if key not in cache:
            a, b, c, d = (orbit.entries[:, i].astype(float) for i in range(4))
            sh = np.sinh(orbit.displacement)
            # unit tangent at x0 toward g x0, from exact entries
            y1 = a * c + b * d
            y2 = 0.5 * (a * a + b * b - c * c - d * d)
            with np.errstate(invalid="ignore", divide="ignore"):
                W = np.stack([np.zeros_like(sh), y1 / sh, y2 / sh], axis=1)
            W[orbit.displacement == 0] = np.array([0.0, 1.0, 0.0])
            P = np.tile(hpoint_vec(X0), (len(orbit), 1))
            cache[key] = _tube_integrals(tube.index, P, W, orbit.displacement)
        out = out - tube.K * cache[key]
    return out


def attach_integrals(orbit: Orbit, F: Potential) -> Orbit:
    return orbit.with_integrals(orbit_integrals(F, orbit))


def period(F: Potential, g: Isometry) -> float:
    """Per_F(g): integral over one period of the axis, from a point on it."""
    _require_hyperbolic(g)
    axis = GeodesicLine.axis(g)
    x = closest_point(X0, axis)
    return _axis_integral(F, g, x)


def _axis_integral(F, g, x):
    ell = translation_length(g)
    y = g(x)
    P = hpoint_vec(x)[None, :]
    W, _ = _frames(P, hpoint_vec(y)[None, :])
    return float(segment_integrals(F, P, W, np.array([ell]))[0])


def delta0_cyclic(F: Potential, gamma0: Isometry) -> float:
    """max of the two period integrals along the closed geodesic, divided by its length."""
    _require_hyperbolic(gamma0)
    ell = translation_length(gamma0)
    forward = period(F, gamma0)
    backward = period(F, gamma0.inverse())
    return max(forward, backward) / ell


# --- orbit sums and critical exponents -----------------------------------

def cyclic_orbit(g: Isometry, R: float) -> Orbit:
    """Powers g^n, n in Z, with displacement <= R."""
    _require_hyperbolic(g)
    rows, disp = [], []
    for sign in (1, -1):
        h = g if sign == 1 else g.inverse()
        cur = Isometry.identity() if sign == 1 else h
        while True:
            dd = hdist(X0, cur(X0))
            if dd > R:
                break
            rows.append(cur.entries)
            disp.append(dd)
            cur = cur @ h
    dtype = np.int64 if g.integral else float
    entries = np.array(rows, dtype=dtype)
    disp = np.array(disp)
    order = np.lexsort([entries[:, 3], entries[:, 2], entries[:, 1], entries[:, 0], disp])
    return Orbit(None, float(R), entries[order], disp[order], meta={"cyclic": g.entries})


def shell_sum(orbit: Orbit, t: float, kappa: float) -> float:
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if t + kappa > orbit.radius + RADIUS_TOL:
        raise IncompleteOrbit(f"orbit complete to {orbit.radius}, shell needs {t + kappa}")
    f = orbit.f_integral if orbit.f_integral is not None else np.zeros(len(orbit))
    mask = (orbit.displacement >= t) & (orbit.displacement < t + kappa)
    return float(np.exp(f[mask]).sum())


@dataclass(frozen=True)
class ExponentFit:
    delta: float
    stderr: float
    intercept: float
    t: np.ndarray
    shell_sums: np.ndarray
    counts: np.ndarray
    residuals: np.ndarray

    def rows(self):
        return [(float(t), float(s), float(np.log(s)) if s > 0 else -math.inf)
                for t, s in zip(self.t, self.shell_sums)]


def _slope(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    n = len(x)
    if n > 2:
        s2 = resid @ resid / (n - 2)
        stderr = math.sqrt(s2 / ((x - x.mean()) @ (x - x.mean())))
    else:
        stderr = math.inf
    return float(coef[0]), float(coef[1]), stderr, resid


def critical_exponent(orbit: Orbit, F: Potential | None = None,
                      t_range: tuple[float, float] = (6.0, 12.0), kappa: float = 0.5) -> ExponentFit:
    """Least-squares slope of ln(shell sum) against the shell start t."""
    t0, t1 = t_range
    if t1 > orbit.radius + RADIUS_TOL:
        raise IncompleteOrbit(f"orbit complete to {orbit.radius}, fit needs {t1}")
    if F is not None:
        orbit = attach_integrals(orbit, F)
    n_shells = int(math.floor((t1 - t0) / kappa + 1e-9))
    ts = t0 + kappa * np.arange(n_shells)
    sums = np.array([shell_sum(orbit, t, kappa) for t in ts])
    counts = np.array([int(((orbit.displacement >= t) & (orbit.displacement < t + kappa)).sum())
                       for t in ts])
    keep = sums > 0
    if keep.sum() < 4:
        raise DegenerateFit(f"only {int(keep.sum())} nonempty shells")
    slope, icpt, stderr, resid = _slope(ts[keep], np.log(sums[keep]))
    return ExponentFit(slope, stderr, icpt, ts, sums, counts, resid)


# --- cocycles ------------------------------------------------------------

class CocycleValue(NamedTuple):
    value: float
    truncation: float
    error: float


def _cocycle_at(F, delta, xi, x, y, T):
    P, W = ray_frame(x, xi)
    Z = ray_point(P, W, T)
    Py = hpoint_vec(y)[None, :]
    Wy, dy = _frames(Py, Z[None, :])
    from_y = segment_integrals(F, Py, Wy, dy)[0] - delta * dy[0]
    from_x = segment_integrals(F, P[None, :], W[None, :], np.array([T]))[0] - delta * T
    return float(from_y - from_x)


def gibbs_cocycle(F: Potential, delta: float, xi, x: HPoint, y: HPoint,
                  T: float = 20.0, tol: float = 1e-4) -> CocycleValue:
    """C_xi(x, y), truncated at depth T along the ray from x toward xi."""
    if T < 5:
        raise ValueError("truncation depth must be at least 5")
    if x == y:
        return CocycleValue(0.0, T, 0.0)
    value = _cocycle_at(F, delta, xi, x, y, T)
    err = abs(value - _cocycle_at(F, delta, xi, x, y, T - 2.0))
    if err > tol:
        raise NonConvergent(f"cocycle truncation error {err:.3g} exceeds {tol:g}")
    return CocycleValue(value, T, err)


def rn_derivative(F: Potential, delta: float, g: Isometry, xi, T: float = 20.0) -> float:
    """d(g^-1)_* mu / d mu at xi, equal to exp(-C_xi(g^-1 x0, x0))."""
    c = gibbs_cocycle(F, delta, xi, g.inverse()(X0), X0, T)
    return math.exp(-c.value)


# --- boundary measures ---------------------------------------------------

def _arc_limits(theta, eps):
    """Visual ball |sin((phi - theta)/2)| <= eps as an angle interval."""
    if eps >= 1:
        return None
    half = 2.0 * math.asin(eps)
    return theta - half, theta + half


class BoundaryMeasure:
    def ball_mass(self, xi, eps: float) -> float:
        raise NotImplementedError

    @property
    def total_mass(self) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class Dirac(BoundaryMeasure):
    xi: float

    def ball_mass(self, xi, eps):
        t0, t1 = boundary_angle(self.xi), boundary_angle(xi)
        return 1.0 if abs(math.sin((t0 - t1) / 2)) <= eps else 0.0

    @property
    def total_mass(self):
        return 1.0


@dataclass(frozen=True)
class LebesgueInterval(BoundaryMeasure):
    """Lebesgue measure on [a, b] in the real line."""

    a: float
    b: float

    def ball_mass(self, xi, eps):
        lim = _arc_limits(boundary_angle(xi), eps)
        if lim is None:
            return self.b - self.a
        lo, hi = lim
        total = 0.0
        # split the arc into pieces inside ]0, 2 pi[, where xi = -cot(theta/2) increases
        for shift in (-2 * math.pi, 0.0, 2 * math.pi):
            l, h = max(lo + shift, 0.0), min(hi + shift, 2 * math.pi)
            if h <= l:
                continue
            xl = -math.inf if l == 0 else -1.0 / math.tan(l / 2)
            xh = math.inf if h == 2 * math.pi else -1.0 / math.tan(h / 2)
            total += max(0.0, min(xh, self.b) - max(xl, self.a))
        return total

    @property
    def total_mass(self):
        return self.b - self.a


@dataclass(frozen=True, eq=False)
class EmpiricalPattersonMeasure(BoundaryMeasure):
    """Normalised atoms at the directions of orbit points seen from x0."""

    xi: np.ndarray
    theta: np.ndarray
    weights: np.ndarray
    s: float
    T: float
    log_mass: float
    shell_width: float | None = None
    _sorted: tuple = field(default=None, repr=False)

    def __post_init__(self):
        order = np.argsort(self.theta, kind="stable")
        th = self.theta[order]
        cw = np.concatenate([[0.0], np.cumsum(self.weights[order])])
        object.__setattr__(self, "_sorted", (th, cw, order))

    def __len__(self):
        return len(self.weights)

    @property
    def total_mass(self):
        return float(self.weights.sum())

    def arc_mass(self, lo: float, hi: float) -> float:
        """Mass of angles in [lo, hi] (radians, any real numbers, hi - lo < 2 pi)."""
        th, cw, _ = self._sorted
        if hi - lo >= 2 * math.pi:
            return float(cw[-1])
        total = 0.0
        for shift in (-2 * math.pi, 0.0, 2 * math.pi):
            l, h = max(lo + shift, 0.0), min(hi + shift, 2 * math.pi)
            if h < l:
                continue
            i, j = np.searchsorted(th, l, "left"), np.searchsorted(th, h, "right")
            total += cw[j] - cw[i]
        return float(total)

    def ball_mass(self, xi, eps):
        lim = _arc_limits(boundary_angle(xi), eps)
        return self.total_mass if lim is None else self.arc_mass(*lim)

    def scaled(self, lam: float) -> EmpiricalPattersonMeasure:
        return EmpiricalPattersonMeasure(self.xi, self.theta, self.weights * lam, self.s,
                                         self.T, self.log_mass, self.shell_width)

    def interval_mass(self, a: float, b: float) -> float:
        m = (self.xi >= a) & (self.xi <= b)
        return float(self.weights[m].sum())


def orbit_directions(orbit: Orbit) -> tuple[np.ndarray, np.ndarray]:
    """(xi, theta) of the rays from x0 through g x0; zero-displacement
    elements are assigned the direction of infinity."""
    a, b, c, d = (orbit.entries[:, i].astype(float) for i in range(4))
    y1 = a * c + b * d
    y2 = 0.5 * (a * a + b * b - c * c - d * d)
    # direction (y1, y2) in the tangent plane at i; the ray ends at angle theta
    theta = np.mod(np.arctan2(-y1, y2), 2 * np.pi)
    theta[orbit.displacement == 0] = 0.0
    with np.errstate(divide="ignore"):
        xi = np.where(theta == 0, np.inf, -1.0 / np.tan(theta / 2))
    return xi, theta


def patterson_empirical(orbit: Orbit, F: Potential | None, s: float, T: float,
                        mass_cap: float = 1e8, shell_width: float | None = None
                        ) -> EmpiricalPattersonMeasure:
    """Atoms e^{f(g) - s d(x0, g x0)} at the directions of g x0, d <= T,
    normalised to mass 1.  With ``shell_width`` only T - w <= d <= T is used."""
    if T > orbit.radius + RADIUS_TOL:
        raise IncompleteOrbit(f"orbit complete to {orbit.radius}, measure needs {T}")
    f = orbit_integrals(F, orbit) if F is not None else (
        orbit.f_integral if orbit.f_integral is not None else np.zeros(len(orbit)))
    mask = orbit.displacement <= T + RADIUS_TOL
    if shell_width is not None:
        mask &= orbit.displacement >= T - shell_width
    logw = f[mask] - s * orbit.displacement[mask]
    if len(logw) == 0:
        raise EmptyBall("no orbit points in range")
    top = logw.max()
    log_mass = float(top + math.log(np.exp(logw - top).sum()))
    if shell_width is None and log_mass > math.log(mass_cap):
        raise MassBlowup(f"unnormalised mass e^{log_mass:.1f} exceeds cap; s is below delta")
    xi, theta = orbit_directions(orbit)
    w = np.exp(logw - log_mass)
    return EmpiricalPattersonMeasure(xi[mask], theta[mask], w, float(s), float(T), log_mass,
                                     shell_width)


def shadow_half_width(displacement: float, R: float) -> float:
    """Half-angle of the shadow of B(y, R) seen from x at distance d."""
    if R >= displacement:
        return math.pi
    return math.asin(math.sinh(R) / math.sinh(displacement))


def mohsen_ratio(measure: EmpiricalPattersonMeasure, element: OrbitElement, R: float = 2.0,
                 delta: float | None = None) -> float:
    """mu(shadow of B(g x0, R)) / e^{f(g) - delta d(x0, g x0)}."""
    delta = measure.s if delta is None else delta
    g, disp, f = element
    half = shadow_half_width(disp, R)
    if half >= math.pi:
        mass = measure.total_mass
    else:
        a, b, c, d = (float(v) for v in g.entries)
        theta = math.atan2(-(a * c + b * d), 0.5 * (a * a + b * b - c * c - d * d))
        mass = measure.arc_mass(theta - half, theta + half)
    if mass <= 0:
        raise EmptyShadow("no atom in the shadow")
    return mass / math.exp(f - delta * disp)


def mohsen_ratios(measure: EmpiricalPattersonMeasure, orbit: Orbit, d_range=(5.0, 9.0),
                  R: float = 2.0, delta: float | None = None) -> np.ndarray:
    lo, hi = d_range
    idx = np.flatnonzero((orbit.displacement >= lo) & (orbit.displacement <= hi))
    return np.array([mohsen_ratio(measure, orbit[int(i)], R, delta) for i in idx])


class Band(NamedTuple):
    c: float  # smallest c with every rescaled ratio in [1/c, c]
    centre: float  # the rescaling, i.e. the normalisation of the measure
    raw: float  # same as c but without rescaling


def fitted_band(ratios: np.ndarray) -> Band:
    """Ratio band after the best rescaling of the measure.

    The empirical measure carries an arbitrary normalisation, and rescaling
    it by lam multiplies every ratio by lam; the smallest symmetric band is
    reached at lam = 1/sqrt(max * min).
    """
    r = np.asarray(ratios, dtype=float)
    if r.size == 0:
        raise EmptyShadow("no ratios to fit")
    hi, lo = float(r.max()), float(r.min())
    return Band(math.sqrt(hi / lo), math.sqrt(hi * lo), max(hi, 1.0 / lo))


# --- dimensions ------------------------------------------------------------

@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    stderr: float
    n: int


def local_dimension(measure: BoundaryMeasure, xi, eps_range=(1e-3, 1e-1), n: int = 9) -> float:
    """Slope of ln mu(B(xi, eps)) against ln eps over a log grid."""
    lo, hi = eps_range
    if hi / lo < 10 * (1 - 1e-12):
        raise ValueError("eps range must span a decade")
    eps = np.geomspace(lo, hi, n)
    mass = np.array([measure.ball_mass(xi, e) for e in eps])
    if mass[0] <= 0:
        raise EmptyBall(f"ball of radius {lo:g} at {xi} has no mass")
    slope, *_ = _slope(np.log(eps), np.log(mass))
    return slope


def mean_local_dimension(measure: BoundaryMeasure, points: Sequence[float],
                         eps_range=(1e-3, 1e-1), n: int = 9) -> DimensionEstimate:
    vals = np.array([local_dimension(measure, xi, eps_range, n) for xi in points])
    return DimensionEstimate(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(len(vals))),
                             len(vals))


def gibbs_dimension(delta_hat: float, F: Potential, points: Sequence[float],
                    T_birkhoff: float = 10.0, base: HPoint = X0) -> DimensionEstimate:
    """delta_hat minus the mean Birkhoff average of F along rays from base."""
    pts = [as_boundary(p) for p in points]
    if not F.tubes:
        return DimensionEstimate(delta_hat - F.constant_part, 0.0, len(pts))
    frames = [ray_frame(base, xi) for xi in pts]
    P = np.array([f[0] for f in frames])
    W = np.array([f[1] for f in frames])
    avg = segment_integrals(F, P, W, np.full(len(pts), T_birkhoff)) / T_birkhoff
    se = float(avg.std(ddof=1) / math.sqrt(len(avg))) if len(avg) > 1 else 0.0
    return DimensionEstimate(float(delta_hat - avg.mean()), se, len(pts))


# --- trace sums ------------------------------------------------------------

@dataclass(frozen=True)
class TraceSumFit:
    delta: float
    stderr: float
    s_values: np.ndarray
    sums: np.ndarray
    r0: float
    ball_radius: float
    sensitivity: dict


def _trace_sums(orbit: Orbit, F: Potential, s_values, r0):
    ent = orbit.entries.astype(float)
    tr = np.abs(ent[:, 0] + ent[:, 3])
    hyp = tr > 2 + 1e-9
    ent, tr = ent[hyp], tr[hyp]
    n = matrix_normal(ent[:, 0], ent[:, 1], ent[:, 2], ent[:, 3])
    dist = np.arcsinh(np.abs(mink(hpoint_vec(X0), n)))
    near = dist <= r0
    ent, tr = ent[near], tr[near]
    if F.tubes:
        per = np.array([period(F, Isometry(*(int(round(v)) for v in row))) for row in ent])
    else:
        per = F.constant_part * 2 * np.arccosh(tr / 2)
    w = np.exp(per)
    return np.array([w[tr <= s + 1e-9].sum() for s in s_values])


def trace_sum_exponent(G: GroupSpec, F: Potential, s_values: Sequence[float], r0: float = 1.0,
                       r0_alternatives: Sequence[float] = (0.5, 1.5)) -> TraceSumFit:
    """Slope of ln sum e^{Per_F(g)} against 2 ln s, over hyperbolic g with
    |tr g| <= s whose axis passes within r0 of x0.

    The full sum over the group diverges (every conjugacy class is
    infinite), so only elements with axes near x0 are kept; they all lie
    in the ball of radius l + 2 r0 around x0, which is enumerated.
    """
    s_values = np.asarray(sorted(s_values), dtype=float)
    radii = [r0, *r0_alternatives]
    R = 2 * math.acosh(s_values[-1] / 2) + 2 * max(radii)
    orbit = enumerate_ball(G, R)
    sums = _trace_sums(orbit, F, s_values, r0)
    keep = sums > 0
    if keep.sum() < 3:
        raise DegenerateFit("fewer than 3 nonempty trace sums")
    slope, _, stderr, _ = _slope(2 * np.log(s_values[keep]), np.log(sums[keep]))
    sens = {}
    for r in r0_alternatives:
        alt = _trace_sums(orbit, F, s_values, r)
        k = alt > 0
        sens[f"r0={r:g}"] = _slope(2 * np.log(s_values[k]), np.log(alt[k]))[0]
    half = len(s_values) // 2
    if keep[half:].sum() >= 3:
        sens["upper_half_s"] = _slope(2 * np.log(s_values[half:][keep[half:]]),
                                      np.log(sums[half:][keep[half:]]))[0]
    return TraceSumFit(slope, stderr, s_values, sums, r0, R, sens)
