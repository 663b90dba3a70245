import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from spiralis.errors import (ConfigError, DegenerateFit, EmptyBall, EmptyShadow,
                             IncompleteOrbit, MassBlowup, NotHyperbolic)
from spiralis.groups import GroupSpec, Orbit, enumerate_ball
from spiralis.hypcore import (INF, X0, GeodesicLine, HPoint, Isometry, apply, boundary_apply,
                              busemann, fixed_points, geodesic_point, hdist, hpoint_vec,
                              translation_length, vec_hpoint)
from spiralis.thermo import (Constant, Dirac, LebesgueInterval, TubeBump, critical_exponent,
                             cyclic_orbit, delta0_cyclic, fitted_band, gibbs_cocycle,
                             gibbs_dimension, line_integral, local_dimension, mohsen_ratio,
                             mohsen_ratios, parse_potential, patterson_empirical, period,
                             rn_derivative, shell_sum, trace_sum_exponent)

from strategies import points

PSL2Z = GroupSpec("psl2z")
GOLDEN = Isometry(2, 1, 1, 1)
OTHER = Isometry(3, 2, 1, 1)  # trace 4, a different closed geodesic
TUBE = TubeBump(GOLDEN, 0.5)

near = st.builds(HPoint, st.floats(-1.5, 1.5), st.floats(0.3, 3.0))


def between(x, y, lam):
    """The point at fraction lam of the way from x to y."""
    X, Y = hpoint_vec(x), hpoint_vec(y)
    d = hdist(x, y)
    W = (Y - math.cosh(d) * X) / math.sinh(d)
    s = lam * d
    return vec_hpoint(math.cosh(s) * X + math.sinh(s) * W)


@pytest.fixture(scope="module")
def ball10():
    return enumerate_ball(PSL2Z, 10.0)


# --- potentials and line integrals -------------------------------------------

def test_parse_potential():
    assert parse_potential("zero") == Constant(0.0)
    assert parse_potential("const:0.5") == Constant(0.5)
    assert parse_potential("tube:0.5", GOLDEN) == TubeBump(GOLDEN, 0.5)
    for bad in ("tube:0.5", "tube:x", "cubic"):
        with pytest.raises(ConfigError):
            parse_potential(bad)
    with pytest.raises(ConfigError):
        TubeBump(GOLDEN, 1.0, GroupSpec("quaternion", a=2, b=3))


def test_potential_values():
    assert TUBE.value(geodesic_point(GeodesicLine.axis(GOLDEN), 0.3)) == pytest.approx(0, abs=1e-12)
    assert TUBE.value(HPoint(0.5, 40.0)) == -0.5
    F = TUBE + 0.25
    assert F.constant_part == 0.25 and F.tubes == (TUBE,)
    assert F.bound == 0.75
    # invariance under the group
    p = HPoint(0.2, 0.9)
    for g in (Isometry(1, 1, 0, 1), Isometry(0, -1, 1, 0), Isometry(5, 2, 2, 1)):
        assert TUBE.value(apply(g, p)) == pytest.approx(TUBE.value(p), abs=1e-12)


@given(points, points, st.floats(-2, 2))
def test_constant_integral(x, y, c):
    assert line_integral(Constant(c), x, y) == pytest.approx(c * hdist(x, y), abs=1e-12)


def test_integral_of_a_point_is_zero():
    assert line_integral(TUBE, X0, X0) == 0.0


# frozen from a midpoint sum with step 5e-5 and brute-force distances to every
# lift of the golden axis within 7 of (0, 1)
@pytest.mark.parametrize("x, y, expect", [
    (HPoint(0.1, 1.3), HPoint(0.7, 0.4), -0.112163307486),
    (HPoint(-0.4, 0.8), HPoint(1.9, 2.5), -0.392286717676),
    (HPoint(0.5, 0.3), HPoint(0.55, 3.0), -0.323168232196),
])
def test_tube_integral_oracle(x, y, expect):
    assert line_integral(TUBE, x, y) == pytest.approx(expect, abs=1e-5)


@settings(max_examples=40)
@given(near, near)
def test_tube_integral_flip(x, y):
    assert line_integral(TUBE, x, y) == pytest.approx(line_integral(TUBE, y, x), abs=1e-6)


@settings(max_examples=40)
@given(near, near, st.floats(0.05, 0.95))
def test_tube_integral_additive(x, y, lam):
    assume(hdist(x, y) > 1e-3)
    z = between(x, y, lam)
    whole = line_integral(TUBE, x, y)
    assert whole == pytest.approx(line_integral(TUBE, x, z) + line_integral(TUBE, z, y), abs=1e-6)


@settings(max_examples=30)
@given(near, near, st.sampled_from([Isometry(1, 1, 0, 1), Isometry(0, -1, 1, 0),
                                    Isometry(2, 1, 1, 1), Isometry(1, 0, -3, 1)]))
def test_tube_integral_invariant(x, y, g):
    assert line_integral(TUBE, apply(g, x), apply(g, y)) == pytest.approx(
        line_integral(TUBE, x, y), abs=1e-6)


# --- periods ------------------------------------------------------------------

def test_period_examples():
    assert period(Constant(0.0), GOLDEN) == 0.0
    assert period(Constant(0.3), OTHER) == pytest.approx(0.3 * translation_length(OTHER))
    assert period(TUBE, GOLDEN) == pytest.approx(0.0, abs=1e-12)
    assert period(TUBE, GOLDEN ** 3) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(NotHyperbolic):
        period(TUBE, Isometry(1, 1, 0, 1))


@pytest.mark.parametrize("g", [OTHER, Isometry(5, 2, 2, 1), Isometry(1, 2, 1, 3)])
def test_period_shift_and_conjugation(g):
    base = period(TUBE, g)
    assert base < 0
    assert period(TUBE + 0.7, g) == pytest.approx(base + 0.7 * translation_length(g), abs=1e-9)
    h = Isometry(1, 3, 0, 1) @ Isometry(0, -1, 1, 0)
    assert period(TUBE, h @ g @ h.inverse()) == pytest.approx(base, abs=1e-6)
    assert period(TUBE, g ** 2) == pytest.approx(2 * base, abs=1e-6)


def test_delta0_examples():
    assert delta0_cyclic(Constant(0.0), GOLDEN) == 0.0
    assert delta0_cyclic(Constant(0.4), GOLDEN) == pytest.approx(0.4)
    assert delta0_cyclic(TUBE, GOLDEN) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(NotHyperbolic):
        delta0_cyclic(TUBE, Isometry(0, -1, 1, 0))


@pytest.mark.parametrize("F", [Constant(0.3), TUBE, TubeBump(GOLDEN, 1.0) + 0.2])
def test_delta0_matches_cyclic_growth(F):
    orbit = cyclic_orbit(OTHER, 60.0)
    fit = critical_exponent(orbit, F, t_range=(10.0, 60.0), kappa=2 * translation_length(OTHER))
    assert fit.delta == pytest.approx(delta0_cyclic(F, OTHER), abs=0.05)


# --- shell sums and exponents -------------------------------------------------

def test_shell_sum(ball10):
    assert shell_sum(ball10, 0.5, 0.1) == 0.0
    count = int(((ball10.displacement >= 7) & (ball10.displacement < 7.5)).sum())
    assert shell_sum(ball10, 7.0, 0.5) == count
    assert shell_sum(ball10, 7.0, 0.25) + shell_sum(ball10, 7.25, 0.25) == count
    with pytest.raises(IncompleteOrbit):
        shell_sum(ball10, 9.8, 0.5)
    with pytest.raises(ValueError):
        shell_sum(ball10, 5.0, 0.0)


def test_critical_exponent_lattice(modular_ball_12):
    fit = critical_exponent(modular_ball_12)
    assert 0.9 <= fit.delta <= 1.1
    assert len(fit.t) == 12 and fit.counts.sum() > 0
    with pytest.raises(IncompleteOrbit):
        critical_exponent(modular_ball_12, t_range=(6.0, 13.0))


def test_critical_exponent_cyclic():
    fit = critical_exponent(cyclic_orbit(GOLDEN, 40.0), t_range=(6.0, 40.0))
    assert abs(fit.delta) <= 0.05


def test_degenerate_fit():
    with pytest.raises(DegenerateFit):
        critical_exponent(cyclic_orbit(GOLDEN, 12.0), t_range=(6.0, 12.0), kappa=0.25)


@pytest.mark.parametrize("c", [0.5, 1.0, -0.3])
def test_constant_shift(ball10, c):
    base = critical_exponent(ball10, TUBE, t_range=(5.0, 10.0))
    shifted = critical_exponent(ball10, TUBE + c, t_range=(5.0, 10.0))
    # weights inside a shell spread by e^{c kappa}, so the shift holds up to fit error
    assert shifted.delta == pytest.approx(base.delta + c, abs=base.stderr + shifted.stderr)


@pytest.mark.parametrize("K1, K2", [(0.0, 0.3), (0.2, 0.9), (0.5, 0.6), (0.1, 1.5)])
def test_pressure_monotone_and_lipschitz(ball10, K1, K2):
    f1 = critical_exponent(ball10, TubeBump(GOLDEN, K1), t_range=(5.0, 10.0))
    f2 = critical_exponent(ball10, TubeBump(GOLDEN, K2), t_range=(5.0, 10.0))
    # a larger K is a pointwise smaller potential
    assert f2.delta <= f1.delta + f1.stderr + f2.stderr
    assert abs(f1.delta - f2.delta) <= abs(K1 - K2) + 2 * (f1.stderr + f2.stderr)


@pytest.mark.parametrize("K", [0.0, 0.5, 1.0])
def test_pressure_gap(ball10, K):
    F = TubeBump(GOLDEN, K)
    assert critical_exponent(ball10, F, t_range=(5.0, 10.0)).delta - delta0_cyclic(F, GOLDEN) > 0


# --- cocycles -------------------------------------------------------------------

def test_cocycle_of_a_point():
    assert gibbs_cocycle(TUBE, 1.0, 0.3, X0, X0).value == 0.0
    with pytest.raises(ValueError):
        gibbs_cocycle(TUBE, 1.0, 0.3, X0, HPoint(0, 2), T=4)


@settings(max_examples=40)
@given(near, near, st.one_of(st.floats(-3, 3), st.just(INF)))
def test_cocycle_zero_potential_is_busemann(x, y, xi):
    c = gibbs_cocycle(Constant(0.0), 1.0, xi, x, y)
    assert c.value == pytest.approx(busemann(xi, x, y), abs=1e-6)
    assert c.error >= 0


@settings(max_examples=25)
@given(near, near, st.floats(-3, 3), st.floats(-1, 1))
def test_cocycle_ignores_constants(x, y, xi, c):
    base = gibbs_cocycle(TUBE, 0.8, xi, x, y)
    assert gibbs_cocycle(TUBE + c, 0.8 + c, xi, x, y).value == pytest.approx(base.value, abs=1e-6)


@settings(max_examples=25)
@given(near, near, near, st.floats(-3, 3))
def test_cocycle_identity(x, y, z, xi):
    a = gibbs_cocycle(TUBE, 0.8, xi, x, z)
    b = gibbs_cocycle(TUBE, 0.8, xi, x, y)
    c = gibbs_cocycle(TUBE, 0.8, xi, y, z)
    assert a.value == pytest.approx(b.value + c.value, abs=a.error + b.error + c.error + 1e-6)


@settings(max_examples=25)
@given(near, near, st.floats(-3, 3),
       st.sampled_from([Isometry(1, 1, 0, 1), Isometry(0, -1, 1, 0), Isometry(2, 1, 1, 1)]))
def test_cocycle_equivariant(x, y, xi, g):
    gxi = boundary_apply(g, xi)
    lhs = gibbs_cocycle(TUBE, 0.8, gxi, apply(g, x), apply(g, y))
    rhs = gibbs_cocycle(TUBE, 0.8, xi, x, y)
    assert lhs.value == pytest.approx(rhs.value, abs=lhs.error + rhs.error + 1e-6)


def test_rn_derivative():
    assert rn_derivative(TUBE, 0.8, Isometry.identity(), 0.4) == 1.0
    g = Isometry(1, 2, 0, 1) @ Isometry(0, -1, 1, 0)
    for xi in (-0.7, 0.2, 3.0):
        expect = math.exp(-busemann(xi, g.inverse()(X0), X0))
        assert rn_derivative(Constant(0.0), 1.0, g, xi) == pytest.approx(expect, rel=1e-6)


@pytest.mark.parametrize("g", [GOLDEN, OTHER, Isometry(5, 2, 2, 1)])
def test_period_is_log_rn_at_attracting_point(g):
    delta = 0.8
    plus = fixed_points(g)[0]
    lhs = math.log(rn_derivative(TUBE, delta, g, plus))
    assert lhs == pytest.approx(period(TUBE, g) - delta * translation_length(g), abs=1e-3)


# --- Patterson measures -------------------------------------------------------

def test_patterson_single_atom():
    ident = Orbit(None, 1.0, np.array([[1, 0, 0, 1]]), np.array([0.0]))
    mu = patterson_empirical(ident, None, 1.0, 1.0)
    assert len(mu) == 1 and mu.total_mass == 1.0


def test_patterson_errors(ball10):
    with pytest.raises(MassBlowup):
        patterson_empirical(ball10, None, 0.2, 10.0, mass_cap=1e3)
    with pytest.raises(IncompleteOrbit):
        patterson_empirical(ball10, None, 1.05, 11.0)


def test_patterson_weights(ball10):
    mu = patterson_empirical(ball10, TUBE, 0.9, 10.0)
    assert np.all(mu.weights > 0)
    assert mu.total_mass == pytest.approx(1.0, abs=1e-12)


def test_patterson_stable_in_T(modular_ball_12):
    m11 = patterson_empirical(modular_ball_12, None, 1.05, 11.0)
    m12 = patterson_empirical(modular_ball_12, None, 1.05, 12.0)
    edges = np.linspace(-2.0, 2.0, 21)
    for a, b in zip(edges[:-1], edges[1:]):
        p, q = m11.interval_mass(a, b), m12.interval_mass(a, b)
        assert abs(p - q) < 0.1 * q


def test_mohsen_ratio_identity(ball10):
    mu = patterson_empirical(ball10, None, 1.05, 10.0)
    assert mohsen_ratio(mu, ball10[0], R=5.0) == pytest.approx(1.0, abs=1e-12)


def test_mohsen_ratio_scales(ball10):
    mu = patterson_empirical(ball10, None, 1.05, 10.0)
    el = ball10[len(ball10) // 3]
    assert mohsen_ratio(mu.scaled(3.0), el) == pytest.approx(3 * mohsen_ratio(mu, el), rel=1e-12)


def test_mohsen_band_small(ball10):
    mu = patterson_empirical(ball10, None, 1.05, 10.0)
    band = fitted_band(mohsen_ratios(mu, ball10, (4.0, 7.0)))
    assert band.c <= 20
    assert band.raw >= band.c


def test_fitted_band():
    band = fitted_band(np.array([0.5, 2.0, 8.0]))
    assert band.c == pytest.approx(4.0) and band.centre == pytest.approx(2.0)
    assert band.raw == pytest.approx(8.0)
    assert fitted_band(np.array([1.5, 6.0, 24.0])).c == pytest.approx(4.0)
    with pytest.raises(EmptyShadow):
        fitted_band(np.array([]))


# --- dimensions -----------------------------------------------------------------

def test_local_dimension_dirac():
    assert local_dimension(Dirac(0.3), 0.3) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(EmptyBall):
        local_dimension(Dirac(0.3), 0.9)
    with pytest.raises(ValueError):
        local_dimension(Dirac(0.3), 0.3, eps_range=(1e-2, 5e-2))


@pytest.mark.parametrize("xi", [0.2, 0.5, 0.8])
def test_local_dimension_lebesgue(xi):
    assert local_dimension(LebesgueInterval(0.0, 1.0), xi) == pytest.approx(1.0, abs=0.05)


def test_lebesgue_ball_mass():
    mu = LebesgueInterval(0.0, 1.0)
    assert mu.ball_mass(0.5, 2.0) == 1.0
    # seen from i, a visual ball of radius eps around x covers about eps (1 + x^2) on each side
    assert mu.ball_mass(0.5, 1e-4) == pytest.approx(2.5e-4, rel=1e-3)
    assert mu.ball_mass(0.0, 1e-4) == pytest.approx(1e-4, rel=1e-3)


def test_local_dimension_patterson(modular_ball_12):
    # only the outer shell resolves scales down to e^-T; inner atoms would
    # dominate the small balls with coarse, heavy weights
    mu = patterson_empirical(modular_ball_12, None, 1.05, 12.0, shell_width=1.0)
    pts = np.random.default_rng(0).uniform(0, 1, 50)
    dims = [local_dimension(mu, x, eps_range=(1e-3, 1e-1)) for x in pts]
    assert np.mean(dims) == pytest.approx(1.0, abs=0.1)


def test_gibbs_dimension_constants():
    pts = [0.1, 0.5, 0.9]
    assert gibbs_dimension(1.0, Constant(0.0), pts).value == 1.0
    # delta_hat shifts by c together with the potential
    assert gibbs_dimension(1.7, Constant(0.7), pts).value == pytest.approx(1.0)
    est = gibbs_dimension(1.0, TUBE, np.linspace(0.05, 0.95, 20))
    assert est.value > 1.0 and est.stderr > 0 and est.n == 20


def test_trace_sum_exponent_psl2z():
    fit = trace_sum_exponent(PSL2Z, Constant(0.0), np.geomspace(10, 60, 8))
    assert fit.delta == pytest.approx(1.0, abs=0.3)
    assert set(fit.sensitivity) >= {"r0=0.5", "r0=1.5"}
    assert np.all(np.diff(fit.sums) >= 0)
