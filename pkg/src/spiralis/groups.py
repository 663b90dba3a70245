"""Arithmetic Fuchsian groups: orbit enumeration and quadratic irrationals.

Three families are supported: PSL2(Z), its principal congruence subgroups
Gamma(N), and the cocompact quaternion lattices Gamma_{a,b}.  Enumerations
are complete balls around the base point (0, 1), using

    cosh d((0,1), g(0,1)) = (a^2 + b^2 + c^2 + d^2) / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterator, NamedTuple

import numpy as np

from .errors import BudgetExceeded, ConfigError, InfinityFixed, NotHyperbolic
from .hypcore import Isometry, classify, matrix_normal, mink, to_hyperboloid

DEFAULT_ELEMENT_CAP = 20_000_000
PSL2Z_R_MAX = 14.0


@dataclass(frozen=True)
class GroupSpec:
    kind: str  # "psl2z" | "congruence" | "quaternion"
    level: int = 0
    a: int = 0
    b: int = 0

    def __post_init__(self):
        if self.kind == "congruence" and self.level < 2:
            raise ConfigError("congruence level must be >= 2")
        if self.kind == "quaternion":
            if self.a < 1 or self.b < 1:
                raise ConfigError("quaternion parameters must be positive integers")
            check_quaternion_division(self.a, self.b)
        if self.kind not in ("psl2z", "congruence", "quaternion"):
            raise ConfigError(f"unknown group kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> GroupSpec:
        text = text.strip().lower()
        try:
            if text == "psl2z":
                return cls("psl2z")
            if text.startswith("congruence:"):
                return cls("congruence", level=int(text.split(":", 1)[1]))
            if text.startswith("quaternion:"):
                a, b = text.split(":", 1)[1].split(",")
                return cls("quaternion", a=int(a), b=int(b))
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"bad group spec {text!r}") from exc
        raise ConfigError(f"bad group spec {text!r}")

    def __str__(self):
        if self.kind == "congruence":
            return f"congruence:{self.level}"
        if self.kind == "quaternion":
            return f"quaternion:{self.a},{self.b}"
        return "psl2z"

    @property
    def integral(self) -> bool:
        return self.kind != "quaternion"

    def contains(self, g: Isometry) -> bool:
        if self.kind == "quaternion":
            return quaternion_coords(self, g) is not None
        if not g.integral:
            return False
        if self.kind == "psl2z":
            return True
        N = self.level
        a, b, c, d = g.entries
        return b % N == 0 and c % N == 0 and ((a - 1) % N == 0 and (d - 1) % N == 0
                                              or (a + 1) % N == 0 and (d + 1) % N == 0)

    @property
    def generators(self) -> tuple[Isometry, ...]:
        return _generators(self)


@lru_cache(maxsize=None)
def _generators(G: GroupSpec) -> tuple[Isometry, ...]:
    if G.kind == "psl2z":
        return (Isometry(0, -1, 1, 0), Isometry(1, 1, 0, 1))
    # small-displacement elements generate a lattice once the ball covers a
    # fundamental domain; radius 4 is ample for the groups used here
    orbit = enumerate_ball(G, 4.0 if G.kind == "congruence" else 5.0)
    return tuple(el.g for el in orbit if el.displacement > 0)


# --- quaternion algebra helpers -------------------------------------------

def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _split_p(n: int, p: int) -> tuple[int, int]:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k, n


def hilbert_symbol(a: int, b: int, p: int) -> int:
    """Local Hilbert symbol (a, b)_p for nonzero integers and a prime p."""
    alpha, u = _split_p(a, p)
    beta, v = _split_p(b, p)
    if p == 2:
        eps = lambda x: ((x - 1) // 2) % 2
        omega = lambda x: ((x * x - 1) // 8) % 2
        e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    return sign * _legendre(u, p) ** beta * _legendre(v, p) ** alpha


def _prime_factors(n: int) -> set[int]:
    out, f = set(), 2
    n = abs(n)
    while f * f <= n:
        while n % f == 0:
            out.add(f)
            n //= f
        f += 1
    if n > 1:
        out.add(n)
    return out


@lru_cache(maxsize=None)
def check_quaternion_division(a: int, b: int, search_bound: int = 1000) -> None:
    """Raise ConfigError unless x^2 - a y^2 - b z^2 = 0 has only the zero solution."""
    primes = _prime_factors(2 * a * b)
    if all(hilbert_symbol(a, b, p) == 1 for p in primes):
        raise ConfigError(f"({a},{b}/Q) splits: x^2-{a}y^2-{b}z^2=0 is solvable")
    y = np.arange(0, search_bound + 1, dtype=np.int64)
    for z in range(0, search_bound + 1):
        rhs = a * y * y + b * z * z
        x = np.sqrt(rhs.astype(float)).round().astype(np.int64)
        hit = (x * x == rhs) & (x <= search_bound) & ((y != 0) | (z != 0))
        if hit.any():
            i = int(np.flatnonzero(hit)[0])
            raise ConfigError(f"nontrivial solution ({x[i]}, {y[i]}, {z})")


def quaternion_matrix(G: GroupSpec, x, y, z, t) -> np.ndarray:
    sa = math.sqrt(G.a)
    return np.stack([x + y * sa, z - t * sa, G.b * (z + t * sa), x - y * sa], axis=-1)


def quaternion_coords(G: GroupSpec, g: Isometry):
    sa = math.sqrt(G.a)
    a, b, c, d = (float(v) for v in g.entries)
    x, y = (a + d) / 2, (a - d) / (2 * sa)
    z, t = (b + c / G.b) / 2, (c / G.b - b) / (2 * sa)
    coords = [round(v) for v in (x, y, z, t)]
    if any(abs(v - r) > 1e-6 for v, r in zip((x, y, z, t), coords)):
        return None
    X, Y, Z, T = coords
    return tuple(coords) if X * X - G.a * Y * Y - G.b * Z * Z + G.a * G.b * T * T == 1 else None


# --- orbit containers ------------------------------------------------------

class OrbitElement(NamedTuple):
    g: Isometry
    displacement: float
    f_integral: float


@dataclass(frozen=True, eq=False)
class Orbit:
    """A finite piece of the orbit Gamma.x0, stored column-wise.

    ``entries`` holds (a, b, c, d) per row: int64 for integer groups,
    float64 for quaternion lattices (then ``coords`` keeps (x, y, z, t)).
    ``radius`` is the ball radius up to which the list is complete.
    """

    group: GroupSpec | None
    radius: float
    entries: np.ndarray
    displacement: np.ndarray
    f_integral: np.ndarray | None = None
    coords: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.displacement)

    def __getitem__(self, i) -> OrbitElement:
        row = self.entries[i]
        if self.entries.dtype.kind == "i":
            g = Isometry(*(int(v) for v in row))
        else:
            g = Isometry(*(float(v) for v in row))
        fi = 0.0 if self.f_integral is None else float(self.f_integral[i])
        return OrbitElement(g, float(self.displacement[i]), fi)

    def __iter__(self) -> Iterator[OrbitElement]:
        return (self[i] for i in range(len(self)))

    @property
    def trace(self) -> np.ndarray:
        return self.entries[:, 0] + self.entries[:, 3]

    def select(self, mask) -> Orbit:
        return replace(
            self,
            entries=self.entries[mask],
            displacement=self.displacement[mask],
            f_integral=None if self.f_integral is None else self.f_integral[mask],
            coords=None if self.coords is None else self.coords[mask],
        )

    def with_integrals(self, values) -> Orbit:
        values = np.asarray(values, dtype=float)
        if values.shape != self.displacement.shape:
            raise ValueError("one integral per orbit element expected")
        return replace(self, f_integral=values)

    def matrices(self) -> np.ndarray:
        return self.entries.astype(float)


def _finalize(G, R, entries, sumsq, coords=None) -> Orbit:
    disp = np.arccosh(np.maximum(sumsq / 2.0, 1.0))
    keys = [entries[:, 3], entries[:, 2], entries[:, 1], entries[:, 0], disp]
    order = np.lexsort(keys)
    return Orbit(G, float(R), entries[order], disp[order],
                 coords=None if coords is None else coords[order])


def predicted_count(G: GroupSpec, R: float) -> float:
    """Rough element count of the ball, used for budgeting only."""
    base = 3.0 * 2 * math.cosh(R)
    if G.kind == "congruence":
        N = G.level
        index = N ** 3
        for p in _prime_factors(N):
            index *= 1 - 1 / p ** 2
        return base / (index / (2 if N > 2 else 1))
    if G.kind == "quaternion":
        return base / 2
    return base


def enumerate_ball(G: GroupSpec, R: float, cap: int = DEFAULT_ELEMENT_CAP,
                   r_max: float | None = None) -> Orbit:
    """All elements (up to sign) with hdist(x0, g x0) <= R, sorted by
    displacement then entries."""
    if R < 0:
        raise ValueError("radius must be nonnegative")
    if r_max is None:
        r_max = PSL2Z_R_MAX if G.kind != "quaternion" else 13.0
    if R > r_max:
        raise BudgetExceeded(f"radius {R} exceeds configured maximum {r_max}")
    if predicted_count(G, R) > cap:
        raise BudgetExceeded(f"ball of radius {R} predicted to exceed {cap} elements")
    if G.kind == "quaternion":
        return _quaternion_ball(G, R)
    orbit = _psl2z_ball(R)
    if G.kind == "congruence":
        N = G.level
        a, b, c, d = orbit.entries.T
        keep = (b % N == 0) & (c % N == 0) & (
            ((a - 1) % N == 0) & ((d - 1) % N == 0) | ((a + 1) % N == 0) & ((d + 1) % N == 0))
        orbit = replace(orbit.select(keep), group=G)
    return orbit


def _ext_gcd(a: np.ndarray, c: np.ndarray):
    """Vectorised extended Euclid: returns (g, x, y) with a x + c y = g."""
    old_r, r = a.copy(), c.copy()
    old_x, x = np.ones_like(a), np.zeros_like(a)
    old_y, y = np.zeros_like(a), np.ones_like(a)
    while np.any(r != 0):
        nz = r != 0
        q = np.zeros_like(r)
        q[nz] = old_r[nz] // r[nz]
        old_r, r = np.where(nz, r, old_r), np.where(nz, old_r - q * r, r)
        old_x, x = np.where(nz, x, old_x), np.where(nz, old_x - q * x, x)
        old_y, y = np.where(nz, y, old_y), np.where(nz, old_y - q * y, y)
    sign = np.where(old_r < 0, -1, 1)
    return old_r * sign, old_x * sign, old_y * sign


def _psl2z_ball(R: float) -> Orbit:
    S = int(math.floor(2 * math.cosh(R) + 1e-9))
    C = math.isqrt(max(S - 1, 0))
    rng = np.arange(-C, C + 1, dtype=np.int64)
    A, Cc = np.meshgrid(rng, rng, indexing="ij")
    A, Cc = A.ravel(), Cc.ravel()
    ok = (A * A + Cc * Cc <= S - 1) & (np.gcd(A, Cc) == 1) & (Cc != 0)
    A, Cc = A[ok], Cc[ok]
    g, x, y = _ext_gcd(A, Cc)
    b0, d0 = -y, x
    m = (A * A + Cc * Cc).astype(float)
    p = (A * b0 + Cc * d0).astype(float)
    T = (S - A * A - Cc * Cc).astype(float)
    q0 = (b0 * b0 + d0 * d0).astype(float)
    disc = np.maximum(p * p - m * (q0 - T), 0.0)
    k_lo = np.floor((-p - np.sqrt(disc)) / m).astype(np.int64) - 1
    k_hi = np.ceil((-p + np.sqrt(disc)) / m).astype(np.int64) + 1
    counts = k_hi - k_lo + 1
    idx = np.repeat(np.arange(len(A)), counts)
    offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    k = k_lo[idx] + offs
    a, c = A[idx], Cc[idx]
    b, d = b0[idx] + k * a, d0[idx] + k * c
    # c == 0 elements: translations [[1, b], [0, 1]]
    bmax = math.isqrt(max(S - 2, 0))
    bt = np.arange(-bmax, bmax + 1, dtype=np.int64)
    one = np.ones_like(bt)
    a = np.concatenate([a, one])
    b = np.concatenate([b, bt])
    c = np.concatenate([c, 0 * bt])
    d = np.concatenate([d, one])
    sumsq = a * a + b * b + c * c + d * d
    tr = a + d
    canon = (tr > 0) | ((tr == 0) & (c > 0))
    keep = (sumsq <= S) & canon
    entries = np.stack([a, b, c, d], axis=1)[keep]
    return _finalize(GroupSpec("psl2z"), R, entries, sumsq[keep].astype(float))


def _quaternion_canonical(x, y, z, t, sa):
    c_sign = np.sign(z + t * sa)
    flip = (x < 0) | ((x == 0) & (c_sign < 0))
    s = np.where(flip, -1, 1)
    return x * s, y * s, z * s, t * s


def _quaternion_solutions(G, Y, Z, T, xmax=None):
    a, b = G.a, G.b
    x2 = 1 + a * Y * Y + b * Z * Z - a * b * T * T
    ok = x2 >= 0
    Y, Z, T, x2 = Y[ok], Z[ok], T[ok], x2[ok]
    X = np.sqrt(x2.astype(float)).round().astype(np.int64)
    sq = X * X == x2
    X, Y, Z, T = X[sq], Y[sq], Z[sq], T[sq]
    if xmax is not None:
        inb = X <= xmax
        X, Y, Z, T = X[inb], Y[inb], Z[inb], T[inb]
    # both signs of x, then keep one representative per +-pair
    pos = X > 0
    X = np.concatenate([X, -X[pos]])
    Y, Z, T = (np.concatenate([w, w[pos]]) for w in (Y, Z, T))
    sa = math.sqrt(a)
    cx, cy, cz, ct = _quaternion_canonical(X, Y, Z, T, sa)
    coords = np.unique(np.stack([cx, cy, cz, ct], axis=1), axis=0)
    return coords


def _quaternion_orbit(G, coords, R) -> Orbit:
    x, y, z, t = (coords[:, i].astype(float) for i in range(4))
    ent = quaternion_matrix(G, x, y, z, t)
    sumsq = (ent * ent).sum(axis=1)
    orbit = _finalize(G, R, ent, sumsq, coords=coords)
    return orbit


def _quaternion_ball(G: GroupSpec, R: float) -> Orbit:
    a, b = G.a, G.b
    S = 2 * math.cosh(R) * (1 + 1e-12)
    sa = math.sqrt(a)
    zmax = int(math.sqrt(S / 2)) + 1
    tmax = int(math.sqrt(S / (2 * a))) + 1
    ymax = int(math.sqrt(S / (2 * a))) + 1
    zz, tt = np.meshgrid(np.arange(-zmax, zmax + 1), np.arange(-tmax, tmax + 1), indexing="ij")
    zz, tt = zz.ravel(), tt.ravel()
    zt = (zz - tt * sa) ** 2 + b * b * (zz + tt * sa) ** 2 <= S
    zz, tt = zz[zt], tt[zt]
    zz, tt = zz.astype(np.int64), tt.astype(np.int64)
    # chunk over y so the candidate grid stays small at large radius
    step = max(1, 4_000_000 // max(len(zz), 1))
    parts = []
    for y0 in range(-ymax, ymax + 1, step):
        ys = np.arange(y0, min(y0 + step, ymax + 1), dtype=np.int64)
        parts.append(_quaternion_solutions(G, np.repeat(ys, len(zz)), np.tile(zz, len(ys)),
                                           np.tile(tt, len(ys))))
    coords = np.unique(np.concatenate(parts), axis=0)
    orbit = _quaternion_orbit(G, coords, R)
    keep = orbit.displacement <= R + 1e-12
    return orbit.select(keep)


def enumerate_quaternion(a: int, b: int, coord_bound: int) -> Orbit:
    """All (x, y, z, t) with max |.| <= B and unit norm form, up to sign."""
    G = GroupSpec("quaternion", a=a, b=b)
    B = int(coord_bound)
    r = np.arange(-B, B + 1, dtype=np.int64)
    Y, Z, T = (v.ravel() for v in np.meshgrid(r, r, r, indexing="ij"))
    coords = _quaternion_solutions(G, Y, Z, T, xmax=B)
    orbit = _quaternion_orbit(G, coords, math.nan)
    orbit.meta["coord_bound"] = B
    return orbit


@dataclass(frozen=True)
class TraceEnumeration:
    s: float
    coord_bound: int
    by_trace: dict  # |trace| -> Orbit

    def all(self) -> list[OrbitElement]:
        return [el for tr in sorted(self.by_trace) for el in self.by_trace[tr]]

    def __len__(self):
        return sum(len(o) for o in self.by_trace.values())


def enumerate_by_trace(G: GroupSpec, s: float, coord_bound: int) -> TraceEnumeration:
    """Elements with 2 < |tr| <= s among those with coordinates bounded by B
    (quaternion coordinates, or matrix entries for integer groups)."""
    B = int(coord_bound)
    if G.kind == "quaternion":
        orbit = enumerate_quaternion(G.a, G.b, B)
    else:
        orbit = enumerate_ball(G, math.acosh(2.0 * B * B))
        orbit = orbit.select(np.abs(orbit.entries).max(axis=1) <= B)
    tr = np.abs(orbit.trace.astype(float))
    if G.kind == "quaternion":
        tr = np.abs(2 * orbit.coords[:, 0]).astype(float)
    mask = (tr > 2 + 1e-9) & (tr <= s + 1e-9)
    groups = {}
    sub = orbit.select(mask)
    trs = tr[mask]
    for value in np.unique(trs):
        groups[float(value)] = sub.select(trs == value)
    return TraceEnumeration(float(s), B, groups)


# --- quadratic irrationals ---------------------------------------------------

def _isqrt_exact(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


@dataclass(frozen=True)
class QuadraticIrrational:
    """(P + sqrt(Delta)) / Q, canonical: Q = 2A, P = -B (or their negatives)
    for the primitive minimal polynomial A z^2 + B z + C, A > 0."""

    P: int
    Q: int
    Delta: int

    def __post_init__(self):
        if self.Q == 0:
            raise ValueError("Q must be nonzero")
        if self.Delta <= 0 or _isqrt_exact(self.Delta):
            raise ValueError("Delta must be a positive non-square")
        P, Q, D = _canonical(self.P, self.Q, self.Delta)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "Delta", D)

    @property
    def value(self) -> float:
        r = math.sqrt(self.Delta)
        if self.P < 0:
            return (self.P * self.P - self.Delta) / (self.Q * (self.P - r))
        return (self.P + r) / self.Q

    def __float__(self):
        return self.value

    def conjugate(self) -> QuadraticIrrational:
        return QuadraticIrrational(-self.P, -self.Q, self.Delta)

    @property
    def height(self) -> float:
        return abs(self.Q) / math.sqrt(self.Delta)

    def minimal_polynomial(self) -> tuple[int, int, int]:
        A = abs(self.Q) // 2
        B = -self.P if self.Q > 0 else self.P
        C = (B * B - self.Delta) // (4 * A)
        return A, B, C

    def apply(self, g: Isometry) -> QuadraticIrrational:
        """g . alpha in exact integer arithmetic."""
        if not g.integral:
            raise TypeError("exact action needs an integer matrix")
        a, b, c, d = g.entries
        P, Q, D = self.P, self.Q, self.Delta
        X = (a * P + b * Q) * (c * P + d * Q) - a * c * D
        Y = (c * P + d * Q) ** 2 - c * c * D
        # numerator is X + Q sqrt(D) = X + sgn(Q) sqrt(Q^2 D)
        if Q < 0:
            X, Y = -X, -Y
        return QuadraticIrrational(X, Y, Q * Q * D)

    def __add__(self, n: int) -> QuadraticIrrational:
        return self.apply(Isometry(1, int(n), 0, 1))

    def cf_digits(self, n: int) -> list[int]:
        """First n continued fraction digits (a_0 first)."""
        A, B, C = self.minimal_polynomial()
        P, Q, D = -B if self.Q > 0 else B, 2 * A if self.Q > 0 else -2 * A, self.Delta
        s = math.isqrt(D)
        out = []
        for _ in range(n):
            a = (P + s) // Q if Q > 0 else (-P - s - 1) // (-Q)
            out.append(a)
            P = a * Q - P
            Q = (D - P * P) // Q
        return out


def _canonical(P: int, Q: int, D: int) -> tuple[int, int, int]:
    A, B, C = Q * Q, -2 * P * Q, P * P - D
    g = math.gcd(math.gcd(A, B), C)
    A, B, C = A // g, B // g, C // g
    Delta = B * B - 4 * A * C
    return (-B, 2 * A, Delta) if Q > 0 else (B, -2 * A, Delta)


def fixed_point_exact(g: Isometry) -> tuple[QuadraticIrrational, QuadraticIrrational]:
    """(attracting, repelling) fixed points of an integer hyperbolic matrix."""
    if not g.integral:
        raise TypeError("integer matrix required")
    if classify(g) != "hyperbolic":
        raise NotHyperbolic(f"{g.entries} is not hyperbolic")
    a, b, c, d = g.entries
    if c == 0:
        raise InfinityFixed("matrix fixes infinity; conjugate first")
    D = (a + d) ** 2 - 4
    r1 = QuadraticIrrational(a - d, 2 * c, D)
    r2 = r1.conjugate()
    if abs(c * r1.value + d) > 1:
        return r1, r2
    return r2, r1


def height(alpha: QuadraticIrrational) -> float:
    return alpha.height


# --- orbits of a hyperbolic fixed-point pair -------------------------------

@dataclass(frozen=True, eq=False)
class AxisOrbit:
    """Distinct lifts k.axis(gamma0), one row per unoriented axis.

    ``conj`` holds the conjugate k gamma0 k^-1 (canonical), ``ends`` its
    (attracting, repelling) fixed points, ``dist`` the distance from x0.
    """

    conj: np.ndarray
    ends: np.ndarray
    dist: np.ndarray
    radius: float

    def __len__(self):
        return len(self.dist)

    @property
    def gap(self) -> np.ndarray:
        return np.abs(self.ends[:, 0] - self.ends[:, 1])


def _canon_rows(m: np.ndarray) -> np.ndarray:
    a, b, c, d = m.T
    tr = a + d
    flip = (tr < 0) | ((tr == 0) & ((c < 0) | ((c == 0) & (a < 0))))
    return np.where(flip[:, None], -m, m)


def conjugates(orbit: Orbit, gamma0: Isometry) -> np.ndarray:
    """Rows k gamma0 k^-1 for every k in the orbit (exact for int64)."""
    K = orbit.entries
    a, b, c, d = K.T
    ka, kb, kc, kd = (np.asarray(v) for v in gamma0.entries)
    if K.dtype.kind != "i":
        ka, kb, kc, kd = (float(v) for v in gamma0.entries)
    # (k g0) k^-1 with k^-1 = [[d, -b], [-c, a]]
    p = a * ka + b * kc
    q = a * kb + b * kd
    r = c * ka + d * kc
    s = c * kb + d * kd
    return np.stack([p * d - q * c, -p * b + q * a, r * d - s * c, -r * b + s * a], axis=1)


def _fixed_points_rows(m: np.ndarray) -> np.ndarray:
    a, b, c, d = (m[:, i].astype(float) for i in range(4))
    disc = np.sqrt((a + d) ** 2 - 4)
    bb = d - a
    sgn = np.where(bb >= 0, 1.0, -1.0)
    q = -0.5 * (bb + sgn * disc)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(c != 0, q / c, np.inf)
        r2 = np.where(q != 0, -b / q, np.inf)
        # c == 0: fixed points are infinity and b / (d - a)
        fin = np.where(c == 0, b / (d - a), r2)
    r1 = np.where(c == 0, np.inf, r1)
    att1 = np.abs(c * np.where(np.isfinite(r1), r1, 0) + d) > 1
    att1 = np.where(c == 0, np.abs(a) > 1, att1)
    first = np.where(att1, r1, fin)
    second = np.where(att1, fin, r1)
    return np.stack([first, second], axis=1)


def axis_orbit(G: GroupSpec, gamma0: Isometry, radius: float,
               cap: int = DEFAULT_ELEMENT_CAP) -> AxisOrbit:
    """All lifts of axis(gamma0) at distance <= radius from x0.

    Complete: a lift at distance r has a coset representative k with
    d(x0, k x0) <= r + d(x0, axis) + l(gamma0)/2.
    """
    if classify(gamma0) != "hyperbolic":
        raise NotHyperbolic("gamma0 must be hyperbolic")
    n0 = matrix_normal(*(float(v) for v in gamma0.entries))
    x0v = to_hyperboloid(0.0, 1.0)
    d0 = math.asinh(abs(float(mink(x0v, n0))))
    ell = 2 * math.acosh(abs(float(gamma0.trace)) / 2)
    ball = enumerate_ball(G, radius + d0 + ell / 2 + 1e-9, cap=cap)
    conj = _canon_rows(conjugates(ball, gamma0))
    inv = _canon_rows(np.stack([conj[:, 3], -conj[:, 1], -conj[:, 2], conj[:, 0]], axis=1))
    # unoriented axis key: lexicographically smaller of conj and its inverse
    if conj.dtype.kind != "i":
        conj_r, inv_r = np.round(conj, 6), np.round(inv, 6)
    else:
        conj_r, inv_r = conj, inv
    key = np.where(_lex_less(inv_r, conj_r)[:, None], inv_r, conj_r)
    _, first = np.unique(key, axis=0, return_index=True)
    first = np.sort(first)
    conj = conj[first]
    n = matrix_normal(*(conj[:, i].astype(float) for i in range(4)))
    dist = np.arcsinh(np.abs(mink(x0v, n)))
    keep = dist <= radius + 1e-12
    conj = conj[keep]
    return AxisOrbit(conj, _fixed_points_rows(conj), dist[keep], float(radius))


def _lex_less(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    out = np.zeros(len(x), dtype=bool)
    decided = np.zeros(len(x), dtype=bool)
    for j in range(x.shape[1]):
        lt = (x[:, j] < y[:, j]) & ~decided
        gt = (x[:, j] > y[:, j]) & ~decided
        out |= lt
        decided |= lt | gt
    return out


class OrbitPoint(NamedTuple):
    value: float
    conjugate: float
    height: float
    exact: QuadraticIrrational | None


def orbit_quadratic_irrationals(G: GroupSpec, gamma0: Isometry, window: tuple[float, float],
                                gap_min: float, margin: float = 4.0,
                                cap: int = DEFAULT_ELEMENT_CAP) -> list[OrbitPoint]:
    """Points of Gamma.{alpha0, alpha0^sigma} in the window with conjugate gap
    |alpha - alpha^sigma| >= gap_min, sorted by value.

    The enumeration radius is -ln(gap_min / 2) + margin.
    """
    if not 0 < gap_min < 2:
        raise ValueError("gap_min must lie in ]0, 2[")
    R = -math.log(gap_min / 2) + margin
    axes = axis_orbit(G, gamma0, R, cap=cap)
    lo, hi = window
    pts = []
    exact_ok = G.integral
    for row, (e1, e2) in zip(axes.conj, axes.ends):
        gap = abs(e1 - e2)
        if not np.isfinite(gap) or gap < gap_min:
            continue
        for v, w in ((e1, e2), (e2, e1)):
            if lo <= v <= hi:
                ex = None
                if exact_ok and row[2] != 0:
                    att, rep = fixed_point_exact(Isometry(*(int(x) for x in row)))
                    ex = att if abs(att.value - v) < abs(rep.value - v) else rep
                h = ex.height if ex is not None else 2.0 / gap
                pts.append(OrbitPoint(float(v), float(w), h, ex))
    pts.sort(key=lambda p: p.value)
    return pts
