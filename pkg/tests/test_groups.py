import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from spiralis.errors import BudgetExceeded, ConfigError, NotHyperbolic
from spiralis.groups import (GroupSpec, QuadraticIrrational, axis_orbit, check_quaternion_division,
                             enumerate_ball, enumerate_by_trace, enumerate_quaternion,
                             fixed_point_exact, height, hilbert_symbol,
                             orbit_quadratic_irrationals, quaternion_coords)
from spiralis.hypcore import X0, Isometry, apply, boundary_apply, hdist

from strategies import integer_hyperbolic

PSL2Z = GroupSpec("psl2z")
Q23 = GroupSpec("quaternion", a=2, b=3)
GOLDEN = Isometry(2, 1, 1, 1)


def sign_classes(rows):
    """Distinct rows up to an overall sign."""
    out = set()
    for r in rows:
        r = tuple(int(v) for v in r)
        out.add(max(r, tuple(-v for v in r)))
    return out


def brute_ball(R):
    bound = 2 * math.cosh(R)
    B = math.isqrt(int(bound))
    r = np.arange(-B, B + 1)
    a, b, c, d = (v.ravel() for v in np.meshgrid(r, r, r, r, indexing="ij"))
    ok = (a * d - b * c == 1) & (a * a + b * b + c * c + d * d <= bound)
    return sign_classes(np.stack([a, b, c, d], axis=1)[ok])


def brute_quaternion(a, b, B):
    r = np.arange(-B, B + 1)
    x, y, z, t = (v.ravel() for v in np.meshgrid(r, r, r, r, indexing="ij"))
    ok = x * x - a * y * y - b * z * z + a * b * t * t == 1
    return np.stack([x, y, z, t], axis=1)[ok]


# --- group specs -----------------------------------------------------------------

def test_parse_round_trip():
    for text in ("psl2z", "congruence:3", "quaternion:2,3"):
        assert str(GroupSpec.parse(text)) == text


@pytest.mark.parametrize("text", ["sl3z", "congruence:1", "congruence:x", "quaternion:2",
                                  "quaternion:1,1", "quaternion:0,3"])
def test_parse_rejects(text):
    with pytest.raises(ConfigError):
        GroupSpec.parse(text)


def test_split_algebras_rejected():
    # (1, b) always splits: x = 1, y = 1, z = 0
    with pytest.raises(ConfigError):
        check_quaternion_division(1, 5)
    # 2 is a non-residue mod 5 and mod 3, so these are division algebras
    check_quaternion_division(2, 5)
    check_quaternion_division(2, 3)


def test_hilbert_symbol_matches_search():
    # (a, b) division iff no nonzero solution; compare the local test to a search
    for a in range(1, 8):
        for b in range(1, 8):
            local_split = all(hilbert_symbol(a, b, p) == 1 for p in (2, 3, 5, 7))
            B = 60
            r = np.arange(0, B + 1)
            y, z = np.meshgrid(r, r, indexing="ij")
            rhs = a * y * y + b * z * z
            x = np.sqrt(rhs).round().astype(int)
            found = bool(((x * x == rhs) & ((y > 0) | (z > 0))).any())
            assert found == local_split, (a, b)


# --- ball enumeration ------------------------------------------------------------

def test_tiny_ball_is_the_stabiliser():
    # the base point (0,1) is fixed by the order-two rotation S as well
    orbit = enumerate_ball(PSL2Z, 0.1)
    assert sign_classes(orbit.entries) == {(1, 0, 0, 1), (0, 1, -1, 0)}
    assert np.all(orbit.displacement == 0)


@pytest.mark.parametrize("R", [1.0, 3.0, 4.5])
def test_ball_matches_brute_force(R):
    orbit = enumerate_ball(PSL2Z, R)
    rows = sign_classes(orbit.entries)
    assert len(rows) == len(orbit)
    assert rows == brute_ball(R)


def test_ball_sorted_and_consistent(modular_ball_12):
    orbit = modular_ball_12
    assert np.all(np.diff(orbit.displacement) >= 0)
    a, b, c, d = orbit.entries.T
    assert np.all(a * d - b * c == 1)
    idx = np.random.default_rng(0).choice(len(orbit), 200, replace=False)
    for i in idx:
        el = orbit[int(i)]
        assert abs(hdist(X0, apply(el.g, X0)) - el.displacement) <= 1e-9 * max(1, el.displacement)
    assert len(sign_classes(orbit.entries[:20000])) == 20000


def test_ball_count_at_six():
    assert len(enumerate_ball(PSL2Z, 6.0)) == len(brute_ball(6.0))


def test_orbital_growth_rate(modular_ball_12):
    shells = np.histogram(modular_ball_12.displacement, bins=np.arange(6.0, 12.01, 0.5))[0]
    slope = np.polyfit(np.arange(6.25, 12.0, 0.5), np.log(shells), 1)[0]
    assert 0.9 <= slope <= 1.1


def test_ball_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_ball(PSL2Z, 15.0)
    with pytest.raises(BudgetExceeded):
        enumerate_ball(PSL2Z, 10.0, cap=1000)
    with pytest.raises(ValueError):
        enumerate_ball(PSL2Z, -1.0)


@pytest.mark.parametrize("N", [2, 3, 5])
def test_congruence_is_a_filter(N):
    G = GroupSpec("congruence", level=N)
    sub = sign_classes(enumerate_ball(G, 7.0).entries)
    full = sign_classes(enumerate_ball(PSL2Z, 7.0).entries)
    assert sub <= full
    expect = {g for g in full if G.contains(Isometry(*g))}
    assert sub == expect
    for a, b, c, d in sub:
        assert b % N == 0 and c % N == 0
        assert (a - d) % N == 0 and (a * a - 1) % N == 0


def test_quaternion_ball_matches_coordinate_sweep():
    orbit = enumerate_ball(Q23, 6.0)
    coords = brute_quaternion(2, 3, 12)
    sa = math.sqrt(2)
    x, y, z, t = coords.T.astype(float)
    sumsq = (x + y * sa) ** 2 + (z - t * sa) ** 2 + (3 * (z + t * sa)) ** 2 + (x - y * sa) ** 2
    inside = sumsq <= 2 * math.cosh(6.0)
    assert len(orbit) == inside.sum() // 2
    got = sign_classes(orbit.coords)
    assert got == sign_classes(coords[inside])


def test_quaternion_elements_are_unimodular():
    orbit = enumerate_quaternion(2, 3, 4)
    assert (1, 0, 0, 0) in sign_classes(orbit.coords)
    a, b, c, d = orbit.entries.T
    assert np.all(np.abs(a * d - b * c - 1) <= 1e-9 * np.maximum(1, np.abs(a * d)))
    x, y, z, t = orbit.coords.T
    assert np.all(x * x - 2 * y * y - 3 * z * z + 6 * t * t == 1)
    for el in list(orbit)[:50]:
        assert quaternion_coords(Q23, el.g) is not None
        assert Q23.contains(el.g)


def test_enumerate_quaternion_count():
    assert len(enumerate_quaternion(2, 3, 10)) == len(brute_quaternion(2, 3, 10)) // 2


def test_enumerate_by_trace():
    assert len(enumerate_by_trace(Q23, 2.0, 10)) == 0
    tr = enumerate_by_trace(Q23, 10.0, 20)
    coords = brute_quaternion(2, 3, 20)
    traces = np.abs(2 * coords[:, 0])
    keep = (traces > 2) & (traces <= 10)
    values, counts = np.unique(traces[keep], return_counts=True)
    assert {float(v): int(n) // 2 for v, n in zip(values, counts)} == \
        {k: len(o) for k, o in tr.by_trace.items()}
    assert tr.coord_bound == 20


def test_enumerate_by_trace_is_a_filter():
    tr = enumerate_by_trace(PSL2Z, 12.0, 15)
    orbit = enumerate_ball(PSL2Z, math.acosh(2 * 15 * 15))
    small = orbit.select(np.abs(orbit.entries).max(axis=1) <= 15)
    t = np.abs(small.trace)
    expect = sign_classes(small.entries[(t > 2) & (t <= 12)])
    got = set()
    for o in tr.by_trace.values():
        got |= sign_classes(o.entries)
    assert got == expect


# --- quadratic irrationals -------------------------------------------------------

def test_golden_fixed_points():
    att, rep = fixed_point_exact(GOLDEN)
    assert (att.P, att.Q, att.Delta) == (1, 2, 5)
    assert (rep.P, rep.Q, rep.Delta) == (-1, -2, 5)
    assert att.value == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-15)
    assert rep.value == pytest.approx((1 - math.sqrt(5)) / 2, abs=1e-15)
    assert rep == att.conjugate()


def test_fixed_point_errors():
    with pytest.raises(NotHyperbolic):
        fixed_point_exact(Isometry(1, 1, 0, 1))
    with pytest.raises(ValueError):
        QuadraticIrrational(1, 2, 4)
    with pytest.raises(ValueError):
        QuadraticIrrational(1, 0, 5)


def _exact_residual(alpha: QuadraticIrrational, g: Isometry) -> int:
    # c z^2 + (d - a) z - b evaluated in Q(sqrt D): returns both components
    a, b, c, d = g.entries
    P, Q, D = alpha.P, alpha.Q, alpha.Delta
    # z = (P + s)/Q, z^2 = (P^2 + D + 2 P s)/Q^2
    rational = Fraction(c * (P * P + D), Q * Q) + Fraction((d - a) * P, Q) - b
    irrational = Fraction(2 * c * P, Q * Q) + Fraction(d - a, Q)
    return rational, irrational


@given(integer_hyperbolic())
def test_fixed_points_are_fixed(g):
    assume(g.entries[2] != 0)
    for alpha in fixed_point_exact(g):
        assert _exact_residual(alpha, g) == (0, 0)
        same = QuadraticIrrational(alpha.P, alpha.Q, alpha.Delta)
        assert (same.P, same.Q, same.Delta) == (alpha.P, alpha.Q, alpha.Delta)
        assert (alpha.Delta - alpha.P ** 2) % alpha.Q == 0


@given(integer_hyperbolic())
def test_height_identity(g):
    a, b, c, d = g.entries
    assume(c != 0)
    att, rep = fixed_point_exact(g)
    expect = 2 * abs(c) / math.sqrt((a + d) ** 2 - 4)
    assert height(att) == pytest.approx(expect, rel=1e-12)
    assert height(att) == pytest.approx(2 / abs(att.value - rep.value), rel=1e-9)


def test_height_examples():
    phi = fixed_point_exact(GOLDEN)[0]
    assert height(phi) == pytest.approx(2 / math.sqrt(5), abs=1e-15)
    assert height(phi + 1) == height(phi)
    assert height(phi + 7) == height(phi)


@given(integer_hyperbolic(), integer_hyperbolic())
def test_exact_action_matches_float(g, h):
    assume(g.entries[2] != 0)
    alpha = fixed_point_exact(g)[0]
    moved = alpha.apply(h)
    expect = boundary_apply(h, alpha.value)
    assume(abs(expect) < 1e6)
    assert moved.value == pytest.approx(expect, rel=1e-9, abs=1e-9)
    # the conjugate moves along
    assert moved.conjugate().value == pytest.approx(
        boundary_apply(h, alpha.conjugate().value), rel=1e-7, abs=1e-7)


def test_cf_digits_examples():
    phi = fixed_point_exact(GOLDEN)[0]
    assert phi.cf_digits(6) == [1, 1, 1, 1, 1, 1]
    assert QuadraticIrrational(0, 1, 2).cf_digits(5) == [1, 2, 2, 2, 2]
    assert QuadraticIrrational(0, 1, 7).cf_digits(9) == [2, 1, 1, 1, 4, 1, 1, 1, 4]


# --- orbits of the golden pair ---------------------------------------------------

@pytest.fixture(scope="module")
def golden_orbit():
    return orbit_quadratic_irrationals(PSL2Z, GOLDEN, (0.0, 1.0), gap_min=0.005)


def test_orbit_points_in_window_and_above_gap(golden_orbit):
    assert len(golden_orbit) > 100
    for p in golden_orbit:
        assert 0 <= p.value <= 1
        assert abs(p.value - p.conjugate) >= 0.005
        assert p.height == pytest.approx(2 / abs(p.value - p.conjugate), rel=1e-9)


def test_orbit_points_end_in_ones(golden_orbit):
    rng = np.random.default_rng(3)
    for i in rng.choice(len(golden_orbit), 50, replace=False):
        digits = golden_orbit[int(i)].exact.cf_digits(80)
        assert set(digits[-30:]) == {1}


def test_orbit_contains_base_point_once():
    pts = orbit_quadratic_irrationals(PSL2Z, GOLDEN, (1.0, 2.0), gap_min=0.5)
    phi = (1 + math.sqrt(5)) / 2
    assert sum(abs(p.value - phi) < 1e-12 for p in pts) == 1


def test_orbit_points_distinct(golden_orbit):
    keys = {(p.exact.P, p.exact.Q, p.exact.Delta) for p in golden_orbit}
    assert len(keys) == len(golden_orbit)


def test_powers_share_the_axis():
    a1 = axis_orbit(PSL2Z, GOLDEN, 3.0)
    a3 = axis_orbit(PSL2Z, GOLDEN ** 3, 3.0)
    assert np.allclose(np.sort(a1.dist), np.sort(a3.dist))
    assert np.allclose(np.sort(a1.ends, axis=None), np.sort(a3.ends, axis=None))


def test_margin_stability():
    base = orbit_quadratic_irrationals(PSL2Z, GOLDEN, (0.0, 1.0), gap_min=0.05, margin=4.0)
    more = orbit_quadratic_irrationals(PSL2Z, GOLDEN, (0.0, 1.0), gap_min=0.05, margin=5.0)
    assert [p.value for p in base] == [p.value for p in more]


def test_axis_orbit_distances():
    axes = axis_orbit(PSL2Z, GOLDEN, 4.0)
    assert np.all(axes.dist <= 4.0 + 1e-12)
    # distance from (0,1) to the geodesic with ends x, y
    x, y = axes.ends[:, 0], axes.ends[:, 1]
    fin = np.isfinite(x) & np.isfinite(y)
    r, m = np.abs(x - y)[fin] / 2, (x + y)[fin] / 2
    # sinh d = |m^2 + 1 - r^2| / (2r)
    d = np.arcsinh(np.abs(m * m + 1 - r * r) / (2 * r))
    assert np.allclose(d, axes.dist[fin], atol=1e-9)


@given(st.integers(2, 40))
def test_quadratic_irrational_sqrt(n):
    assume(math.isqrt(n) ** 2 != n)
    q = QuadraticIrrational(0, 1, n)
    assert q.value == pytest.approx(math.sqrt(n), rel=1e-15)
    assert q.height == pytest.approx(1 / math.sqrt(n), rel=1e-12)
