"""Hyperbolic geometry of the upper half-plane.

Boundary points are plain floats, with ``math.inf`` standing for the point
at infinity.  Most computations go through the hyperboloid model, where
geodesic lines are planes and distances to them are linear functionals;
the half-plane is only the user-facing chart.

Hyperboloid conventions: a point ``u + iv`` maps to
``X = ((1+u²+v²)/2v, u/v, (u²+v²-1)/2v)`` with form
``<X, Y> = -X0 Y0 + X1 Y1 + X2 Y2``, so that ``cosh d(x, y) = -<X, Y>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Integral

import numpy as np

from .errors import DegenerateRay, NotHyperbolic

INF = math.inf
FLOAT_TOL = 1e-9

_J = np.array([-1.0, 1.0, 1.0])


@dataclass(frozen=True)
class HPoint:
    u: float
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.v)) or self.v <= 0:
            raise ValueError(f"not a point of the upper half-plane: ({self.u}, {self.v})")

    @property
    def z(self) -> complex:
        return complex(self.u, self.v)


X0 = HPoint(0.0, 1.0)


def as_boundary(xi) -> float:
    xi = float(xi)
    if math.isnan(xi):
        raise ValueError("boundary point is NaN")
    return INF if math.isinf(xi) else xi


def _is_int(x) -> bool:
    return isinstance(x, Integral)


@dataclass(frozen=True)
class Isometry:
    """An element of PSL2(R), stored with a canonical sign.

    Integer entries are kept as Python ints so products stay exact.
    """

    a: object
    b: object
    c: object
    d: object

    def __post_init__(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        if self.integral:
            a, b, c, d = int(a), int(b), int(c), int(d)
            if a * d - b * c != 1:
                raise ValueError(f"det != 1 for integer matrix {(a, b, c, d)}")
        else:
            a, b, c, d = float(a), float(b), float(c), float(d)
            det = a * d - b * c
            if abs(det - 1.0) > FLOAT_TOL * max(1.0, abs(a * d) + abs(b * c)):
                raise ValueError(f"det = {det} != 1")
        if _needs_flip(a, b, c, d):
            a, b, c, d = -a, -b, -c, -d
        for name, val in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, val)

    @property
    def integral(self) -> bool:
        return all(_is_int(x) for x in (self.a, self.b, self.c, self.d))

    @classmethod
    def identity(cls) -> Isometry:
        return cls(1, 0, 0, 1)

    @property
    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self):
        return self.a + self.d

    def __matmul__(self, other: Isometry) -> Isometry:
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return Isometry(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self) -> Isometry:
        return Isometry(self.d, -self.b, -self.c, self.a)

    def __pow__(self, n: int) -> Isometry:
        base = self if n >= 0 else self.inverse()
        out = Isometry.identity() if self.integral else Isometry(1.0, 0.0, 0.0, 1.0)
        for _ in range(abs(n)):
            out = out @ base
        return out

    def __call__(self, p: HPoint) -> HPoint:
        return apply(self, p)

    def derivative(self, xi: float) -> float:
        """|g'(xi)| for the homography on the real line."""
        den = self.c * xi + self.d
        return INF if den == 0 else 1.0 / float(den) ** 2

    def as_float(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)


def _needs_flip(a, b, c, d) -> bool:
    tr = a + d
    tol = 0 if _is_int(tr) else 1e-12
    if tr > tol:
        return False
    if tr < -tol:
        return True
    if c != 0:
        return c < 0
    return a < 0


def apply(g: Isometry, p: HPoint) -> HPoint:
    # Im w = v / |cz + d|^2 since det g = 1; computing it this way keeps
    # it positive when the entries are large
    a, b, c, d = (float(x) for x in g.entries)
    z = p.z
    den = c * z + d
    n2 = den.real ** 2 + den.imag ** 2
    w = (a * z + b) * den.conjugate()
    return HPoint(w.real / n2, p.v / n2)


def boundary_apply(g: Isometry, xi: float) -> float:
    xi = as_boundary(xi)
    if xi == INF:
        return INF if g.c == 0 else g.a / g.c
    den = g.c * xi + g.d
    if den == 0:
        return INF
    return as_boundary((g.a * xi + g.b) / den)


def classify(g: Isometry) -> str:
    """One of 'identity', 'elliptic', 'parabolic', 'hyperbolic'."""
    tr = abs(g.trace)
    if g.integral:
        if tr == 2 and g.b == 0 and g.c == 0:
            return "identity"
        return "elliptic" if tr < 2 else "parabolic" if tr == 2 else "hyperbolic"
    if abs(tr - 2) <= FLOAT_TOL:
        if abs(g.b) <= FLOAT_TOL and abs(g.c) <= FLOAT_TOL:
            return "identity"
        return "parabolic"
    return "elliptic" if tr < 2 else "hyperbolic"


def _require_hyperbolic(g: Isometry):
    kind = classify(g)
    if kind != "hyperbolic":
        raise NotHyperbolic(f"{g.entries} is {kind}")


def translation_length(g: Isometry) -> float:
    _require_hyperbolic(g)
    return 2.0 * math.acosh(abs(float(g.trace)) / 2.0)


def fixed_points(g: Isometry) -> tuple[float, float]:
    """(attracting, repelling) fixed points on the boundary."""
    _require_hyperbolic(g)
    a, b, c, d = (float(x) for x in g.entries)
    if c == 0:
        other = b / (d - a)
        return (INF, other) if abs(a) > 1 else (other, INF)
    disc = math.sqrt((a + d) ** 2 - 4.0)
    # roots of c z^2 + (d - a) z - b = 0, computed without cancellation
    bb = d - a
    q = -0.5 * (bb + math.copysign(disc, bb if bb != 0 else 1.0))
    r1, r2 = q / c, -b / q
    if abs(c * r1 + d) > 1:
        return r1, r2
    return r2, r1


# --- hyperboloid model -------------------------------------------------------

def mink(x, y):
    """Minkowski form, broadcasting over leading axes."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return -x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] + x[..., 2] * y[..., 2]


def to_hyperboloid(u, v) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    r2 = u * u + v * v
    return np.stack([(1 + r2) / (2 * v), u / v, (r2 - 1) / (2 * v)], axis=-1)


def from_hyperboloid(X) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    v = 1.0 / (X[..., 0] - X[..., 2])
    return X[..., 1] * v, v


def hpoint_vec(p: HPoint) -> np.ndarray:
    return to_hyperboloid(p.u, p.v)


def vec_hpoint(X) -> HPoint:
    u, v = from_hyperboloid(X)
    return HPoint(float(u), float(v))


def null_vector(xi) -> np.ndarray:
    """Light-like vector representing a boundary point (scale is arbitrary)."""
    xi = as_boundary(xi)
    if xi == INF:
        return np.array([0.5, 0.0, 0.5])
    if abs(xi) > 1:
        # rescaled by 1/xi^2 so huge points do not overflow
        r = 1 / xi
        return np.array([(r * r + 1) / 2, r, (1 - r * r) / 2])
    return np.array([(1 + xi * xi) / 2, xi, (xi * xi - 1) / 2])


def null_to_boundary(N) -> float:
    N = np.asarray(N, dtype=float)
    den = N[0] - N[2]
    if abs(den) <= 1e-15 * abs(N[0]):
        return INF
    return float(N[1] / den)


def unit_normal(N1, N2) -> np.ndarray:
    """Unit space-like normal of the plane spanned by two null vectors."""
    n = _J * np.cross(N1, N2)
    return n / math.sqrt(mink(n, n))


def matrix_normal(a, b, c, d) -> np.ndarray:
    """Unit normal of the axis of a hyperbolic matrix, exact in the entries."""
    a, b, c, d = (np.asarray(x, dtype=float) for x in (a, b, c, d))
    n = np.stack([b - c, d - a, b + c], axis=-1)
    return n / np.sqrt((a + d) ** 2 - 4)[..., None]


def lorentz(g: Isometry) -> np.ndarray:
    """3x3 matrix L with to_hyperboloid(g.z) = L @ to_hyperboloid(z)."""
    return lorentz_from_entries(*(float(x) for x in g.entries))


def lorentz_from_entries(a, b, c, d) -> np.ndarray:
    M = np.array([[a, b], [c, d]])
    cols = []
    for e in np.eye(3):
        S = np.array([[e[0] + e[2], e[1]], [e[1], e[0] - e[2]]])
        T = M @ S @ M.T
        cols.append([(T[0, 0] + T[1, 1]) / 2, T[0, 1], (T[0, 0] - T[1, 1]) / 2])
    return np.array(cols).T


def ray_frame(p: HPoint, xi) -> tuple[np.ndarray, np.ndarray]:
    """(P, W): base point and unit tangent of the ray from p toward xi."""
    P = hpoint_vec(p)
    N = null_vector(xi)
    W = N / (-mink(P, N)) - P
    return P, W


def ray_point(P, W, s):
    s = np.asarray(s, dtype=float)
    return np.cosh(s)[..., None] * P + np.sinh(s)[..., None] * W


# --- metric ------------------------------------------------------------------

def hdist(p: HPoint, q: HPoint) -> float:
    num = (p.u - q.u) ** 2 + (p.v - q.v) ** 2
    return math.acosh(1.0 + num / (2.0 * p.v * q.v))


def busemann(xi, x: HPoint, y: HPoint) -> float:
    """beta_xi(x, y) = lim d(x, xi_t) - d(y, xi_t)."""
    xi = as_boundary(xi)
    if xi == INF:
        return math.log(y.v / x.v)
    hx = x.v / ((x.u - xi) ** 2 + x.v ** 2)
    hy = y.v / ((y.u - xi) ** 2 + y.v ** 2)
    return math.log(hy / hx)


@dataclass(frozen=True)
class GeodesicLine:
    endpoint_minus: float
    endpoint_plus: float

    def __post_init__(self):
        m, p = as_boundary(self.endpoint_minus), as_boundary(self.endpoint_plus)
        if m == p:
            raise ValueError("geodesic endpoints must be distinct")
        object.__setattr__(self, "endpoint_minus", m)
        object.__setattr__(self, "endpoint_plus", p)

    def normal(self) -> np.ndarray:
        """Unit normal, the same as unit_normal of the endpoint null vectors
        but free of cancellation when the endpoints are close."""
        a, b = self.endpoint_minus, self.endpoint_plus
        if a == INF:
            return np.array([b, 1.0, b])
        if b == INF:
            return -np.array([a, 1.0, a])
        return np.array([1.0 + a * b, a + b, a * b - 1.0]) / (a - b)

    def image(self, g: Isometry) -> GeodesicLine:
        return GeodesicLine(boundary_apply(g, self.endpoint_minus),
                            boundary_apply(g, self.endpoint_plus))

    @classmethod
    def axis(cls, g: Isometry) -> GeodesicLine:
        attracting, repelling = fixed_points(g)
        return cls(repelling, attracting)


@dataclass(frozen=True)
class UnitTangentVector:
    """Hopf coordinates; t is signed arclength from the point of the line
    closest to the base point, positive toward v_plus."""

    v_minus: float
    v_plus: float
    t: float

    def __post_init__(self):
        if as_boundary(self.v_minus) == as_boundary(self.v_plus):
            raise ValueError("v_minus and v_plus must differ")

    def footpoint(self, origin: HPoint = X0) -> HPoint:
        return geodesic_point(GeodesicLine(self.v_minus, self.v_plus), self.t, origin)


def dist_to_geodesic(p: HPoint, L: GeodesicLine) -> float:
    return math.asinh(abs(float(mink(hpoint_vec(p), L.normal()))))


def _closest_vec(X, n):
    k = mink(X, n)
    return (X - k * n) / math.sqrt(1.0 + k * k)


def closest_point(p: HPoint, L: GeodesicLine) -> HPoint:
    return vec_hpoint(_closest_vec(hpoint_vec(p), L.normal()))


def geodesic_point(L: GeodesicLine, s: float, origin: HPoint = X0) -> HPoint:
    C = _closest_vec(hpoint_vec(origin), L.normal())
    N = null_vector(L.endpoint_plus)
    T = N / (-mink(C, N)) - C
    return vec_hpoint(math.cosh(s) * C + math.sinh(s) * T)


def gromov_product(x: HPoint, xi, eta) -> float:
    z = closest_point(x, GeodesicLine(xi, eta))
    return 0.5 * (busemann(xi, x, z) + busemann(eta, x, z))


def visual_distance(x: HPoint, xi, eta) -> float:
    xi, eta = as_boundary(xi), as_boundary(eta)
    if xi == eta:
        return 0.0
    return math.exp(-gromov_product(x, xi, eta))


def tube_interval(A, B, k):
    """All real s with |A cosh s + B sinh s| <= k, as (lo, hi) or None.

    lo may be -inf and hi may be inf.
    """
    q, r = A + B, A - B
    if q == 0:
        if A == 0:
            raise DegenerateRay("ray lies on the target geodesic")
        return math.log(abs(A) / k), INF
    if q < 0:
        q, r = -q, -r
    disc = k * k - q * r
    if disc < 0:
        return None
    # with y = e^s the condition reads q y^2 - 2k y + r <= 0 <= q y^2 + 2k y + r
    sq = math.sqrt(disc)
    lo, hi = abs(k - sq) / q, (k + sq) / q
    return (math.log(lo) if lo > 0 else -INF), math.log(hi)


def penetration_interval(A, B, k):
    """Solve |A cosh s + B sinh s| <= k for s >= 0.

    Returns (t_in, t_out) or None; t_out is inf when A + B == 0.
    """
    iv = tube_interval(A, B, k)
    if iv is None or iv[1] < 0:
        return None
    return max(iv[0], 0.0), iv[1]


def entry_exit(ray: tuple[HPoint, float], L: GeodesicLine, eps0: float):
    """Arclength times at which the ray enters and leaves the closed
    eps0-neighbourhood of L, or None when it never meets it."""
    if eps0 <= 0:
        raise ValueError("eps0 must be positive")
    origin, xi = ray
    xi = as_boundary(xi)
    P, W = ray_frame(origin, xi)
    n = L.normal()
    A, B = float(mink(P, n)), float(mink(W, n))
    k = math.sinh(eps0)
    if xi in (L.endpoint_minus, L.endpoint_plus):
        # shared endpoint: |A cosh s + B sinh s| = |A| e^{-s}
        if abs(A) < 1e-12:
            raise DegenerateRay("ray lies on the target geodesic")
        return max(0.0, math.log(abs(A) / k)), INF
    if abs(A) < 1e-13 and abs(B) < 1e-13:
        raise DegenerateRay("ray lies on the target geodesic")
    return penetration_interval(A, B, k)


def shadow_contains(x: HPoint, y: HPoint, R: float, xi) -> bool:
    """Does the ray [x, xi) meet the closed ball B(y, R)?"""
    P, W = ray_frame(x, xi)
    Y = hpoint_vec(y)
    alpha, beta = -float(mink(Y, P)), -float(mink(Y, W))
    # cosh d(y, ray(s)) = alpha cosh s + beta sinh s, minimised over s >= 0
    s = max(0.0, math.atanh(max(-1.0, min(1.0, -beta / alpha))))
    cosh_min = alpha * math.cosh(s) + beta * math.sinh(s)
    return cosh_min <= math.cosh(R) * (1 + 1e-12)


def isometry_to_base(x: HPoint) -> Isometry:
    """An isometry sending x to (0, 1)."""
    s = math.sqrt(x.v)
    return Isometry(1.0 / s, -x.u / s, 0.0, s)


def boundary_angle(xi, x: HPoint = X0) -> float:
    """Angle in [0, 2 pi) of the direction from x toward xi.

    Visual distance seen from x is |sin((theta1 - theta2)/2)|.
    """
    xi = boundary_apply(isometry_to_base(x), xi) if x != X0 else as_boundary(xi)
    if xi == INF:
        return 0.0
    # inverse Cayley: xi = -cot(theta/2)
    return 2.0 * math.atan2(1.0, -xi)


def angle_to_boundary(theta, x: HPoint = X0) -> float:
    theta = math.fmod(theta, 2 * math.pi)
    if theta < 0:
        theta += 2 * math.pi
    xi = INF if theta == 0 else -1.0 / math.tan(theta / 2)
    if x != X0:
        xi = boundary_apply(isometry_to_base(x).inverse(), xi)
    return xi
