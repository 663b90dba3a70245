"""Experiments: Khintchine-type approximation, penetration profiles, log law.

Randomness is counter-based: sample i of a run with seed s draws from a
Philox stream keyed by (s, i), so results never depend on evaluation order.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np
from numba import njit

from .errors import (ConfigError, DegenerateRay, EmptyOrbitSlice, PrecisionExhausted)
from .groups import GroupSpec, QuadraticIrrational, axis_orbit
from .hypcore import (INF, X0, HPoint, Isometry, as_boundary, hdist, matrix_normal, mink,
                      ray_frame, tube_interval)

SCHEMA = "spiralis/report/1"
GOLDEN = Isometry(2, 1, 1, 1)
LN_PHI = math.log((1 + math.sqrt(5)) / 2)

# pre-registered verdict thresholds (pilot calibration, echoed in reports)
DIVERGENT_FALL = 5.0
CONVERGENT_KEEP = 0.5
DEFAULT_H_SCHEDULE = (6.0, 8.0, 10.0, 12.0)


# --- rate functions ------------------------------------------------------

class RateFunction:
    def __call__(self, t):
        raise NotImplementedError

    def diverges(self, exponent: float) -> bool:
        """Does the integral of phi(t)^exponent / t over [1, inf[ diverge?"""
        raise NotImplementedError

    def admissible(self, c3: float = 0.5, t_max: float = 1e12) -> bool:
        """Doubling check phi(2t) >= c3 phi(t) on a log grid, values in ]0, 1]."""
        t = np.geomspace(1.0, t_max, 400)
        v, v2 = np.asarray(self(t)), np.asarray(self(2 * t))
        return bool(np.all((v > 0) & (v <= 1)) and np.all(v2 >= c3 * v))


@dataclass(frozen=True)
class PowerLog(RateFunction):
    s: float

    def __call__(self, t):
        return np.minimum(1.0, np.log(np.asarray(t, dtype=float) + math.e) ** (-self.s))

    def diverges(self, exponent):
        return self.s * exponent <= 1

    def __str__(self):
        return f"powerlog:{self.s:g}"


@dataclass(frozen=True)
class Power(RateFunction):
    eps: float

    def __call__(self, t):
        return np.minimum(1.0, np.asarray(t, dtype=float) ** (-self.eps))

    def diverges(self, exponent):
        return self.eps * exponent <= 0

    def __str__(self):
        return f"power:{self.eps:g}"


@dataclass(frozen=True)
class Table(RateFunction):
    """Piecewise log-linear interpolation of (t, phi) samples."""

    t: tuple
    values: tuple

    def __call__(self, t):
        lt = np.log(np.asarray(self.t, dtype=float))
        lv = np.log(np.asarray(self.values, dtype=float))
        return np.exp(np.interp(np.log(np.asarray(t, dtype=float)), lt, lv))

    def diverges(self, exponent):
        # extrapolate the last power law
        lt = np.log(np.asarray(self.t[-2:], dtype=float))
        lv = np.log(np.asarray(self.values[-2:], dtype=float))
        slope = (lv[1] - lv[0]) / (lt[1] - lt[0])
        return slope * exponent >= 0

    def __str__(self):
        return "table"


def parse_phi(text: str) -> RateFunction:
    text = text.strip().lower()
    try:
        kind, val = text.split(":", 1)
        if kind == "powerlog":
            return PowerLog(float(val))
        if kind == "power":
            return Power(float(val))
    except ValueError as exc:
        raise ConfigError(f"bad rate function {text!r}") from exc
    raise ConfigError(f"bad rate function {text!r}")


# --- sampling --------------------------------------------------------------

def stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, index], dtype=np.uint64)))


@dataclass(frozen=True)
class LebesgueWindow:
    a: float = 0.0
    b: float = 1.0


@dataclass(frozen=True)
class Empirical:
    measure: object  # anything with .xi and .weights arrays


def sample_boundary(spec, n: int, seed: int) -> list[float]:
    if n < 1:
        raise ValueError("n must be at least 1")
    u = np.array([stream(seed, i).random() for i in range(n)])
    if isinstance(spec, LebesgueWindow):
        return list(spec.a + (spec.b - spec.a) * u)
    if isinstance(spec, Empirical):
        w = np.asarray(spec.measure.weights, dtype=float)
        cdf = np.cumsum(w)
        idx = np.minimum(np.searchsorted(cdf, u * cdf[-1], side="right"), len(w) - 1)
        return [float(spec.measure.xi[i]) for i in idx]
    raise TypeError(f"unknown sampling spec {spec!r}")


# --- reports ---------------------------------------------------------------

def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


@dataclass
class ExperimentReport:
    kind: str
    settings: dict
    thresholds: dict = field(default_factory=dict)
    samples: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    verdict: str | None = None

    def to_dict(self) -> dict:
        return _clean({"schema": SCHEMA, **asdict(self)})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"


# --- Khintchine statistic -------------------------------------------------

@dataclass(frozen=True, eq=False)
class OrbitPoints:
    """Orbit of a hyperbolic fixed-point pair: values, heights and the
    distance from x0 to the geodesic joining each point to its conjugate."""

    values: np.ndarray
    heights: np.ndarray
    complexity: np.ndarray
    radius: float

    def __len__(self):
        return len(self.values)


def golden_orbit_points(G: GroupSpec, gamma0: Isometry, radius: float,
                        window=(-1.0, 2.0)) -> OrbitPoints:
    ax = axis_orbit(G, gamma0, radius)
    vals = np.concatenate([ax.ends[:, 0], ax.ends[:, 1]])
    gap = np.concatenate([ax.gap, ax.gap])
    dist = np.concatenate([ax.dist, ax.dist])
    m = np.isfinite(vals) & (vals >= window[0]) & (vals <= window[1])
    order = np.argsort(vals[m], kind="stable")
    return OrbitPoints(vals[m][order], (2.0 / gap[m])[order], dist[m][order], float(radius))


def khintchine_statistic(x: float, values, heights, phi: RateFunction, H: float,
                         complexity=None) -> float:
    """min of h(r) |x - r| / phi(h(r)) over orbit points with complexity <= H
    (complexity defaults to the height itself)."""
    values = np.asarray(values, dtype=float)
    heights = np.asarray(heights, dtype=float)
    comp = heights if complexity is None else np.asarray(complexity, dtype=float)
    m = comp <= H
    if not m.any():
        raise EmptyOrbitSlice(f"no orbit point with complexity <= {H}")
    h = heights[m]
    return float(np.min(h * np.abs(x - values[m]) / phi(h)))


def running_minima(x: float, pts: OrbitPoints, phi: RateFunction, schedule) -> list[float]:
    base = pts.heights / phi(pts.heights)
    stat = base * np.abs(x - pts.values)
    return [float(stat[pts.complexity <= R].min()) for R in schedule]


def _verdict(first: float, last: float) -> str:
    if last <= 0 or first / last >= DIVERGENT_FALL:
        return "DIVERGENT-CONSISTENT"
    if last / first >= CONVERGENT_KEEP:
        return "CONVERGENT-CONSISTENT"
    return "INCONCLUSIVE"


def khintchine_experiment(G: GroupSpec, gamma0: Isometry, phi: RateFunction, F=None,
                          n_samples: int = 200, H_schedule=DEFAULT_H_SCHEDULE, seed: int = 0,
                          window=(0.0, 1.0), measure=None, delta_gap: float | None = None
                          ) -> ExperimentReport:
    """Running minima of the Khintchine statistic along the schedule of
    radii, for boundary points drawn from Lebesgue (F = 0) or from an
    empirical Patterson measure."""
    from .thermo import Constant

    F = Constant(0.0) if F is None else F
    schedule = [float(r) for r in H_schedule]
    settings = {"group": str(G), "gamma0": list(gamma0.entries), "phi": str(phi),
                "potential": str(F), "n_samples": n_samples, "seed": seed,
                "H_schedule": schedule, "window": list(window)}
    thresholds = {"divergent_fall": DIVERGENT_FALL, "convergent_keep": CONVERGENT_KEEP}
    report = ExperimentReport("khintchine", settings, thresholds)
    if n_samples == 0:
        return report
    if F.tubes and measure is None:
        raise ConfigError("a potential other than a constant needs a sampling measure")
    spec = Empirical(measure) if measure is not None else LebesgueWindow(*window)
    xs = sample_boundary(spec, n_samples, seed)
    lo, hi = min(xs), max(xs)
    pts = golden_orbit_points(G, gamma0, max(schedule), (min(lo, 0.0) - 1, max(hi, 1.0) + 1))
    mins = np.array([running_minima(x, pts, phi, schedule) for x in xs])
    for i, (x, row) in enumerate(zip(xs, mins)):
        report.samples.append({"index": i, "x": x, "running_min": list(row)})
    med = np.median(mins, axis=0)
    report.summary = {
        "median": list(med),
        "q10": list(np.quantile(mins, 0.1, axis=0)),
        "q90": list(np.quantile(mins, 0.9, axis=0)),
        "fall_factor": float(med[0] / med[-1]) if med[-1] > 0 else INF,
        "orbit_points": len(pts),
    }
    if delta_gap is not None:
        report.summary["expected"] = ("DIVERGENT" if phi.diverges(delta_gap) else "CONVERGENT")
        report.summary["delta_minus_delta0"] = delta_gap
    report.verdict = _verdict(med[0], med[-1])
    return report


# --- penetrations ------------------------------------------------------------

class PenetrationEvent(NamedTuple):
    t_in: float
    t_out: float
    lift_id: tuple

    @property
    def duration(self) -> float:
        return self.t_out - self.t_in


def _canon_axis_key(m) -> tuple:
    """Hashable key of the unoriented axis of an integer hyperbolic matrix."""
    a, b, c, d = (int(v) for v in m)
    cands = []
    for e in ((a, b, c, d), (d, -b, -c, a)):
        if e[0] + e[3] < 0 or (e[0] + e[3] == 0 and (e[2] < 0 or (e[2] == 0 and e[0] < 0))):
            e = tuple(-v for v in e)
        cands.append(e)
    return min(cands)


def _check_generic(xi: float, lifts_ends):
    for e1, e2 in lifts_ends:
        if xi == e1 or xi == e2:
            raise DegenerateRay("ray endpoint is fixed by a conjugate of gamma0")


def penetration_profile(x0: HPoint, xi, gamma0: Isometry, G: GroupSpec, eps0: float,
                        t_max: float, margin: float = 1.0, method: str = "auto",
                        panel: float = 0.25) -> list[PenetrationEvent]:
    """Penetrations of the ray [x0, xi) into eps0-neighbourhoods of the
    lifts of axis(gamma0), with entry time at most t_max, sorted by entry.

    ``method="ball"`` enumerates every lift within t_max + eps0 + margin of
    x0 (exponential in t_max); ``method="fd"`` walks the ray through the
    fundamental domain of PSL2(Z) and only looks at lifts near it.
    """
    if eps0 <= 0:
        raise ValueError("eps0 must be positive")
    xi = as_boundary(xi)
    if method == "auto":
        method = "fd" if G.kind == "psl2z" and eps0 + panel / 2 <= 1.25 else "ball"
    if method == "ball":
        return _profile_ball(x0, xi, gamma0, G, eps0, t_max, margin)
    if G.kind != "psl2z":
        raise ConfigError("the fundamental-domain walk is implemented for psl2z only")
    return _profile_fd(x0, xi, gamma0, eps0, t_max, panel)


def _profile_ball(x0, xi, gamma0, G, eps0, t_max, margin):
    d0 = hdist(X0, x0)
    ax = axis_orbit(G, gamma0, t_max + eps0 + margin + d0)
    _check_generic(xi, ax.ends)
    P, W = ray_frame(x0, xi)
    n = matrix_normal(*(ax.conj[:, i].astype(float) for i in range(4)))
    A, B = mink(P, n), mink(W, n)
    k = math.sinh(eps0)
    events = []
    for row, a, b in zip(ax.conj, A, B):
        iv = tube_interval(float(a), float(b), k)
        if iv is None or iv[1] < 0:
            continue
        t_in, t_out = max(iv[0], 0.0), iv[1]
        if t_in <= t_max and t_out > t_in:
            key = _canon_axis_key(row) if ax.conj.dtype.kind == "i" else tuple(np.round(row, 9))
            events.append(PenetrationEvent(t_in, t_out, key))
    events.sort()
    return events


def _lc(V):
    return [V[0] - V[2], V[0] + V[2], V[1]]


def _lc_form(a, b):
    return -0.5 * (a[0] * b[1] + a[1] * b[0]) + a[2] * b[2]


def _reduce_tracked(P, W, k):
    """Reduce the frame to the fundamental domain; k maps the reduced frame
    back to the original one and is updated in place (integer matrix)."""
    for _ in range(10_000):
        n = math.floor(P[2] / P[0] + 0.5)
        if n != 0:
            for V in (P, W):
                m, p, x = V
                V[2] = x - n * m
                V[1] = p - 2 * n * x + n * n * m
            # k <- k T^n
            k[1] += n * k[0]
            k[3] += n * k[2]
        if P[1] < P[0] * (1 - 1e-14):
            for V in (P, W):
                V[0], V[1], V[2] = V[1], V[0], -V[2]
            # k <- k S^-1, S^-1 = [[0, 1], [-1, 0]]
            k[0], k[1], k[2], k[3] = -k[1], k[0], -k[3], k[2]
        else:
            return


def _profile_fd(x0, xi, gamma0, eps0, t_max, panel):
    from .thermo import tube_index

    index = tube_index(gamma0)
    Pv, Wv = ray_frame(x0, xi)
    P, W = _lc(Pv), _lc(Wv)
    k = [1, 0, 0, 1]
    nsub = max(1, int(math.ceil((t_max + eps0) / panel)))
    w = (t_max + eps0) / nsub
    reach = math.sinh(eps0 + 0.5 * w) * (1 + 1e-12)
    kk = math.sinh(eps0)
    seen = {}
    center = 0.5 * w

    def flow(t):
        c, s = math.cosh(t), math.sinh(t)
        for i in range(3):
            p_, w_ = P[i], W[i]
            P[i] = c * p_ + s * w_
            W[i] = s * p_ + c * w_

    flow(0.5 * w)
    for _ in range(nsub):
        _reduce_tracked(P, W, k)
        # renormalise
        s = math.sqrt(-_lc_form(P, P))
        P[:] = [v / s for v in P]
        q = _lc_form(W, P)
        W[:] = [wv + q * pv for wv, pv in zip(W, P)]
        s = math.sqrt(_lc_form(W, W))
        W[:] = [v / s for v in W]
        for i, nrm in enumerate(index.normals):
            a = _lc_form(P, nrm)
            if abs(a) > reach:
                continue
            b = _lc_form(W, nrm)
            iv = tube_interval(a, b, kk)
            if iv is None:
                continue
            t_in, t_out = max(center + iv[0], 0.0), center + iv[1]
            if t_out <= t_in or t_out < 0 or t_in > t_max:
                continue
            ka, kb, kc, kd = k
            ca, cb, cc, cd = (int(v) for v in index.conj[i])
            # k C k^-1 with k^-1 = [[kd, -kb], [-kc, ka]]
            pa, pb = ka * ca + kb * cc, ka * cb + kb * cd
            pc, pd = kc * ca + kd * cc, kc * cb + kd * cd
            key = _canon_axis_key((pa * kd - pb * kc, -pa * kb + pb * ka,
                                   pc * kd - pd * kc, -pc * kb + pd * ka))
            if key not in seen:
                seen[key] = PenetrationEvent(t_in, t_out, key)
        flow(w)
        center += w
    return sorted(seen.values())


def p_max(events: Sequence[PenetrationEvent], t: float) -> float:
    """Longest penetration among events entered by time t (0 if none)."""
    durations = [min(e.t_out, INF) - e.t_in for e in events if e.t_in <= t]
    return max(durations, default=0.0)


# --- continued fractions ---------------------------------------------------

def _cf_exact(num: int, den: int, n: int) -> list[int]:
    out = []
    while len(out) < n and den:
        a, r = divmod(num, den)
        out.append(a)
        num, den = den, r
    return out


def _as_interval(x) -> tuple[Fraction, Fraction]:
    if isinstance(x, (Fraction, int)):
        lo = hi = Fraction(x)
    elif isinstance(x, str):
        dec = Decimal(x)
        half = Fraction(1, 2) * Fraction(10) ** dec.as_tuple().exponent
        lo, hi = Fraction(dec) - half, Fraction(dec) + half
    else:
        xf = float(x)
        half = Fraction(math.ulp(xf)) / 2
        lo, hi = Fraction(xf) - half, Fraction(xf) + half
    if not (0 < lo and hi < 1):
        raise ValueError("x must lie in ]0, 1[")
    return lo, hi


def _certified(lo: Fraction, hi: Fraction, limit: int) -> list[int]:
    """Digits shared by both ends of [lo, hi], at most limit of them."""
    # both ends run the exact Euclidean algorithm; they agree exactly while
    # the interval stays inside one cylinder set
    out: list[int] = []
    lo_n, lo_d = lo.denominator, lo.numerator
    hi_n, hi_d = hi.denominator, hi.numerator
    while len(out) < limit and lo_d and hi_d:
        q1, r1 = divmod(lo_n, lo_d)
        q2, r2 = divmod(hi_n, hi_d)
        if q1 != q2 or r1 == 0 or r2 == 0:
            break
        out.append(q1)
        lo_n, lo_d = lo_d, r1
        hi_n, hi_d = hi_d, r2
    return out


def cf_digits(x, n: int) -> list[int]:
    """First n partial quotients a_1, a_2, ... of x in ]0, 1[.

    Quadratic irrationals are expanded exactly.  Floats and decimal strings
    are treated as intervals (half an ulp, or half a unit in the last
    place) and only digits shared by the whole interval are returned;
    PrecisionExhausted is raised when fewer than n are certified.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if isinstance(x, QuadraticIrrational):
        if not 0 < x.value < 1:
            raise ValueError("x must lie in ]0, 1[")
        return x.cf_digits(n + 1)[1:]
    out = _certified(*_as_interval(x), n)
    if len(out) < n:
        raise PrecisionExhausted(f"only {len(out)} digits certified, {n} requested")
    return out


def convergents(digits: Sequence[int]) -> tuple[list[int], list[int]]:
    """p_n, q_n for n = 0..len(digits) of [0; a_1, a_2, ...]."""
    pm, qm = 1, 0
    p, q = [0], [1]
    for a in digits:
        pn, qn = a * p[-1] + pm, a * q[-1] + qm
        pm, qm = p[-1], q[-1]
        p.append(pn)
        q.append(qn)
    return p, q


@njit(cache=True)
def _cf_chain(u, digits, log_q):
    """Digits of a uniformly distributed x, driven by uniforms u.

    Given a_1..a_n, the point T^n x has density proportional to
    1/(1 + r y)^2 on ]0, 1[ with r = q_{n-1}/q_n; sampling it by inversion
    and keeping only the next digit is exact in distribution.
    """
    r = 0.0
    lq = 0.0
    for i in range(u.shape[0]):
        y = u[i] / (1.0 + r - r * u[i])
        a = math.floor(1.0 / y)
        if a < 1:
            a = 1
        digits[i] = a
        r = 1.0 / (a + r)
        lq -= math.log(r)
        log_q[i] = lq


def cf_sample(n: int, seed: int, index: int) -> tuple[np.ndarray, np.ndarray]:
    """(digits a_1..a_n, ln q_1..ln q_n) of a Lebesgue-random x in ]0, 1[."""
    u = stream(seed, index).random(n)
    u = np.where(u == 0.0, np.nextafter(0.0, 1.0), u)
    digits = np.empty(n, dtype=np.int64)
    log_q = np.empty(n)
    _cf_chain(u, digits, log_q)
    return digits, log_q


class CFRun(NamedTuple):
    position: int  # index n of the last digit before the run (0 = before a_1)
    length: int
    time: float  # model entry time 2 ln q_n
    duration: float  # model duration 2 k ln(golden ratio)


def cf_fast_penetrations(digits, log_q=None) -> list[CFRun]:
    """Maximal runs of 1's, mapped to model penetrations of the golden tube."""
    d = np.asarray(digits)
    if log_q is None:
        _, q = convergents([int(v) for v in d])
        log_q = np.log(np.array(q[1:], dtype=float))
    ones = np.concatenate([[0], (d == 1).astype(np.int8), [0]])
    edges = np.diff(ones)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    runs = []
    for s, e in zip(starts, ends):
        lq = 0.0 if s == 0 else float(log_q[s - 1])
        k = int(e - s)
        runs.append(CFRun(int(s), k, 2 * lq, 2 * k * LN_PHI))
    return runs


def longest_run(digits, value: int = 1) -> int:
    best = cur = 0
    for a in np.asarray(digits):
        cur = cur + 1 if a == value else 0
        best = max(best, cur)
    return best


@njit(cache=True)
def _longest_runs_at(digits, marks):
    out = np.zeros(marks.shape[0], dtype=np.int64)
    best = cur = 0
    j = 0
    for i in range(digits.shape[0]):
        if digits[i] == 1:
            cur += 1
            if cur > best:
                best = cur
        else:
            cur = 0
        while j < marks.shape[0] and marks[j] == i + 1:
            out[j] = best
            j += 1
    return out


def _certified_digits(x, time_needed: float) -> list[int]:
    """Digits until 2 ln q_n exceeds time_needed."""
    if isinstance(x, QuadraticIrrational):
        n = 8
        while 2 * math.log(convergents(digits := cf_digits(x, n))[1][-1]) <= time_needed:
            n *= 2
        return digits
    digits = _certified(*_as_interval(x), 10_000)
    q = convergents(digits)[1]
    for i, qn in enumerate(q):
        if 2 * math.log(qn) > time_needed:
            return digits[:i]
    raise PrecisionExhausted(f"x does not carry enough digits to reach time {time_needed:g}")


def cf_refined_events(x, eps0: float, t_max: float) -> list[PenetrationEvent]:
    """Golden-tube penetrations of the ray from i toward x in ]0, 1[, read
    off the continued fraction.

    Every lift met by the ray has the form M.axis with M = M_n [[j, 1], [1, 0]],
    0 <= j <= a_{n+1}, M_n = [[p_n, p_{n-1}], [q_n, q_{n-1}]]; entry and exit
    times come from the closed-form tube solver.  Lifts attached to q_n enter
    after time about 2 ln q_n - 2, so digits are consumed up to there.
    """
    digits = _certified_digits(x, t_max + eps0 + 4.0)
    p, q = convergents(digits)
    prev_p, prev_q = [1] + p, [0] + q
    mats = [(0, 1, 1, 0)]
    for n, a in enumerate(digits):
        pn, qn, pm, qm = p[n], q[n], prev_p[n], prev_q[n]
        mats.extend((j * pn + pm, pn, j * qn + qm, qn) for j in range(a + 1))
    xf = x.value if isinstance(x, QuadraticIrrational) else float(x)
    P, W = ray_frame(X0, xf)
    kk = math.sinh(eps0)
    seen = {}
    for (a, b, c, d) in mats:
        det = a * d - b * c
        # M [[2, 1], [1, 1]] M^-1
        pa, pb, pc, pd = 2 * a + b, a + b, 2 * c + d, c + d
        conj = tuple(det * v for v in (pa * d - pb * c, -pa * b + pb * a,
                                       pc * d - pd * c, -pc * b + pd * a))
        key = _canon_axis_key(conj)
        if key in seen:
            continue
        n = matrix_normal(*(float(v) for v in conj))
        iv = tube_interval(float(mink(P, n)), float(mink(W, n)), kk)
        if iv is None or iv[1] < 0:
            continue
        t_in, t_out = max(iv[0], 0.0), iv[1]
        if t_in <= t_max and t_out > t_in:
            seen[key] = PenetrationEvent(t_in, t_out, key)
    return sorted(seen.values())


# --- log law ---------------------------------------------------------------

def loglaw_experiment(G: GroupSpec, gamma0: Isometry, F=None, eps0: float = 0.5,
                      t_grid=(5.0, 10.0, 15.0, 20.0), n_samples: int = 200, seed: int = 0,
                      method: str = "cf", digit_marks=(10_000, 100_000, 1_000_000),
                      delta_gap: float = 1.0, measure=None) -> ExperimentReport:
    """p_max(t)/ln t per sample (geometric method), or the longest run of
    1's at the digit marks (continued-fraction method, PSL2(Z) and the
    golden axis only), compared with 1/(delta - delta0)."""
    from .thermo import Constant

    F = Constant(0.0) if F is None else F
    settings = {"group": str(G), "gamma0": list(gamma0.entries), "potential": str(F),
                "eps0": eps0, "n_samples": n_samples, "seed": seed, "method": method}
    target = 1.0 / delta_gap
    report = ExperimentReport("loglaw", settings, {"target": target})
    if n_samples == 0:
        return report
    if method == "cf":
        if G.kind != "psl2z" or _canon_axis_key(gamma0.entries) != _canon_axis_key(GOLDEN.entries) \
                or F.tubes or F.constant_part != 0:
            raise ConfigError("the continued-fraction path covers psl2z, golden axis, F = 0")
        marks = np.array(sorted(int(m) for m in digit_marks), dtype=np.int64)
        settings["digit_marks"] = [int(m) for m in marks]
        stats = []
        for i in range(n_samples):
            digits, log_q = cf_sample(int(marks[-1]), seed, i)
            runs = _longest_runs_at(digits, marks)
            row = runs * 2 * LN_PHI / np.log(marks.astype(float))
            stats.append(row)
            report.samples.append({"index": i, "longest_run": [int(r) for r in runs],
                                   "statistic": list(row), "log_q_final": float(log_q[-1])})
        stats = np.array(stats)
        med = np.median(stats, axis=0)
        report.summary = {"median": list(med), "q05": list(np.quantile(stats, 0.05, axis=0)),
                          "q95": list(np.quantile(stats, 0.95, axis=0))}
        top = float(med[-1])
        report.summary["closer_at_top"] = bool(abs(top - target) <= abs(med[0] - target))
    else:
        t_grid = [float(t) for t in t_grid]
        settings["t_grid"] = t_grid
        spec = Empirical(measure) if measure is not None else LebesgueWindow(0.0, 1.0)
        xs = sample_boundary(spec, n_samples, seed)
        stats = []
        for i, x in enumerate(xs):
            ev = penetration_profile(X0, x, gamma0, G, eps0, max(t_grid))
            row = [p_max(ev, t) / math.log(t) for t in t_grid]
            stats.append(row)
            report.samples.append({"index": i, "x": x, "statistic": row, "events": len(ev)})
        stats = np.array(stats)
        med = np.median(stats, axis=0)
        report.summary = {"median": list(med), "q05": list(np.quantile(stats, 0.05, axis=0)),
                          "q95": list(np.quantile(stats, 0.95, axis=0))}
        top = float(med[-1])
        report.summary["closer_at_top"] = bool(abs(top - target) <= abs(med[0] - target))
    report.verdict = ("CONSISTENT" if 0.75 * target <= top <= 1.3 * target else "INCONSISTENT")
    return report
