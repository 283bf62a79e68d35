import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from salpeter_bounds.bounds import Problem, semiclassical_objective
from salpeter_bounds.errors import (
    ConfigurationError,
    CouplingTooLargeError,
    DomainError,
    InvalidCurveError,
)
from salpeter_bounds.kinetic_potentials import (
    P_LOWER_TABLE,
    P_SCHRODINGER_TABLE,
    TABLE1_PRINTED,
    BoundaryMinimumWarning,
    CouplingCurve,
    PKind,
    PNumberSet,
    PotentialSum,
    PowerTerm,
    computed_p_number,
    coulomb_lower_energy,
    coulomb_running_p,
    energy_from_kinetic_potential,
    kinetic_potential_from_curve,
    lower_p_set,
    p_log,
    p_lower,
    p_schrodinger,
    p_variational,
    p_variational_log,
    schrodinger_p_set,
    variational_p_set,
)


# ---------------------------------------------------------------- potentials


def test_potential_sum_evaluates_terms():
    V = PotentialSum.from_coefficients(coulomb=0.1, log=0.25, linear=0.25, quadratic=0.25)
    r = np.array([0.3, 1.0, 2.5])
    expected = -0.1 / r + 0.25 * np.log(r) + 0.25 * r + 0.25 * r ** 2
    assert np.allclose(V(r), expected, rtol=1e-15)
    assert V.exponents == (-1.0, 0.0, 1.0, 2.0)
    assert V.coulomb == 0.1 and V.coefficient(0.0) == 0.25


def test_negative_power_sign():
    # sgn(q) makes a q < 0 term attractive
    assert PowerTerm(-0.5, 2.0)(4.0) == pytest.approx(-1.0)


def test_potential_invariants():
    with pytest.raises(DomainError):
        PotentialSum.from_coefficients()
    with pytest.raises(DomainError):
        PotentialSum((PowerTerm(1.0, 1.0), PowerTerm(1.0, 2.0)))
    with pytest.raises(DomainError):
        PowerTerm(1.0, -1.0)
    with pytest.raises(DomainError):
        PowerTerm(0.0, 1.0)
    with pytest.raises(DomainError):
        PotentialSum.from_coefficients(linear=1.0, extra={1.0: 2.0})


def test_potential_classification():
    assert PotentialSum.from_coefficients(coulomb=0.2).is_pure_coulomb
    assert not PotentialSum.from_coefficients(coulomb=0.2).has_confining_term
    assert PotentialSum.from_coefficients(log=1.0).has_confining_term


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 20.0), st.lists(st.floats(0.01, 50.0), min_size=100, max_size=100))
def test_coupling_absorption(c, radii):
    problem = Problem.from_coefficients(m=0.7, coulomb=0.02, log=0.3, linear=0.25, quadratic=0.5)
    scaled = Problem(problem.beta, problem.m, problem.potential.scaled(c))
    # fixed P-factors so only the coefficients change
    p_set = variational_p_set(problem.potential, 1.5)
    for r in radii:
        kin = math.sqrt(problem.m ** 2 + 1.0 / r ** 2)
        base = semiclassical_objective(r, problem, p_set) - kin
        new = semiclassical_objective(r, scaled, p_set) - kin
        assert new == pytest.approx(c * base, rel=1e-11, abs=1e-11)


# ---------------------------------------------------------------- P-number formulas


def test_p_lower_examples():
    assert p_lower(1.0, 2.23225) == pytest.approx((2.23225 / 2) ** 2, rel=1e-14)
    assert p_lower(1.0, 2.23225) == pytest.approx(1.2457, abs=5e-5)
    assert p_lower(1.0, 2.0) == pytest.approx(1.0, abs=1e-15)
    # direct evaluation of |E/(1+q)|^(1+1/q) |q| at q = 2
    assert p_lower(2.0, 2.338107) == pytest.approx((2.338107 / 3) ** 1.5 * 2, rel=1e-14)
    assert p_lower(2.0, 2.338107) == pytest.approx(1.3760832, abs=1e-7)


@pytest.mark.parametrize("q", [-1.0, -1.5, 0.0])
def test_p_lower_domain(q):
    with pytest.raises(DomainError):
        p_lower(q, 1.0)


def test_p_schrodinger_examples():
    assert p_schrodinger(2.0, 3.0) == pytest.approx(1.5, abs=1e-12)
    assert p_schrodinger(-1.0, -0.25) == pytest.approx(1.0, abs=1e-12)
    assert p_schrodinger(1.0, 2.3381075) == pytest.approx(1.376084, abs=1e-6)


@pytest.mark.parametrize("q", [-2.0, -3.0, 0.0])
def test_p_schrodinger_domain(q):
    with pytest.raises(DomainError):
        p_schrodinger(q, 1.0)


def test_p_log_examples():
    assert p_log(PKind.RELATIVISTIC_LOWER, 1.06365) == pytest.approx(1.0657, abs=5e-5)
    assert p_log("schrodinger", 1.0443325) == pytest.approx(1.218669, abs=1e-6)
    assert p_log("relativistic_lower", 1.0) == 1.0
    with pytest.raises(DomainError):
        p_log(PKind.VARIATIONAL, 1.0)


def test_duality_links_table_columns():
    # p + r^2 ~ p^2 + r: the lower P for q = 2 and the Schrodinger P for q = 1
    # come from the same eigenvalue.
    e = 2.3381074
    assert p_lower(2.0, e) == pytest.approx(p_schrodinger(1.0, e), rel=1e-12)


def test_p_variational_examples():
    assert p_variational(2.0, 2.0) == pytest.approx(1.5, abs=1e-12)
    assert p_variational(2.0, 1.0) == pytest.approx(math.sqrt(1.5) / math.gamma(1.5), rel=1e-13)
    assert p_variational(2.0, 1.0) == pytest.approx(1.38198, abs=1e-5)
    assert p_variational(2.0, -1.0) == pytest.approx(math.sqrt(1.5) * math.gamma(1.5), rel=1e-13)
    assert p_variational(2.0, -1.0) == pytest.approx(1.08540, abs=1e-5)
    assert p_variational_log(2.0) == pytest.approx(1.24730, abs=1e-5)


def _trial_moments(nu, q):
    """<p^2>^(1/2) and <r^q>^(1/q) (exp<ln r> for q = 0) of exp(-r^nu / 2)
    by brute-force quadrature on a log grid."""
    r = np.geomspace(1e-9, 80.0, 400_001)
    phi = np.exp(-0.5 * r ** nu)
    dphi = -0.5 * nu * r ** (nu - 1.0) * phi
    w = np.gradient(r)
    norm = np.sum(phi ** 2 * r ** 2 * w)
    p2 = np.sum(dphi ** 2 * r ** 2 * w) / norm
    if q == 0.0:
        moment = math.exp(np.sum(np.log(r) * phi ** 2 * r ** 2 * w) / norm)
    else:
        moment = (np.sum(r ** q * phi ** 2 * r ** 2 * w) / norm) ** (1.0 / q)
    return math.sqrt(p2), moment


@pytest.mark.parametrize("nu", [1.0, 1.4, 1.6, 2.0, 2.5])
@pytest.mark.parametrize("q", [-1.0, 0.0, 0.5, 1.0, 2.0])
def test_p_variational_matches_trial_quadrature(nu, q):
    root_p2, moment = _trial_moments(nu, q)
    assert p_variational(nu, q) == pytest.approx(root_p2 * moment, rel=2e-5)


@given(st.floats(0.3, 5.0), st.floats(-2.9, 4.0).filter(lambda q: abs(q) > 1e-3))
def test_p_variational_closed_form(nu, q):
    expected = (0.5 * nu * math.sqrt(math.gamma(2 + 1 / nu) / math.gamma(3 / nu))
                * math.exp((math.lgamma((q + 3) / nu) - math.lgamma(3 / nu)) / q))
    assert p_variational(nu, q) == pytest.approx(expected, rel=1e-10)
    assert p_variational_log(nu) > 0.0


def test_p_variational_domain():
    with pytest.raises(DomainError):
        p_variational(0.0, 1.0)
    with pytest.raises(DomainError):
        p_variational(1.0, -3.0)


def test_lower_below_schrodinger():
    for q in (1.0, 2.0):
        assert P_LOWER_TABLE[q] < P_SCHRODINGER_TABLE[q]


def test_printed_table_keeps_rounding_direction():
    for q, (e1, _, e2, _) in TABLE1_PRINTED.items():
        if q in (1.0, 2.0):
            # E1 rounded down, E2 rounded up relative to converged oracle values
            exact = {1.0: (2.2322863, 2.3381074), 2.0: (2.3381074, 3.0)}[q]
            assert e1 <= exact[0] and e2 >= exact[1]


# ---------------------------------------------------------------- Coulomb


def test_coulomb_closed_form():
    assert coulomb_running_p(0.0) == 1.0
    assert coulomb_running_p(0.1) == pytest.approx(math.sqrt((1 + math.sqrt(0.96)) / 2), abs=1e-15)
    assert coulomb_running_p(0.1) == pytest.approx(0.99493615, abs=1e-8)
    assert coulomb_running_p(0.49) == pytest.approx(0.7742731, abs=1e-7)
    assert coulomb_running_p(0.5 - 1e-12) == pytest.approx(1 / math.sqrt(2), abs=1e-5)
    assert coulomb_lower_energy(0.0, 3.0) == 3.0
    assert coulomb_lower_energy(0.1, 2.0) == pytest.approx(2 * coulomb_running_p(0.1))


def test_coulomb_running_p_is_self_consistent():
    # e_L = min_r sqrt(1 + 1/r^2) - v/(P_L r), with P_L = e_L, on a fine grid
    for v in (0.05, 0.1, 0.3, 0.45):
        p = coulomb_running_p(v)
        r = np.geomspace(0.05, 200.0, 2_000_001)
        grid_min = float(np.min(np.sqrt(1 + 1 / r ** 2) - v / (p * r)))
        assert grid_min == pytest.approx(p, abs=1e-9)


def test_coulomb_running_p_decreasing():
    v = np.linspace(0.0, 0.499, 200)
    p = np.array([coulomb_running_p(x) for x in v])
    assert np.all(np.diff(p) < 0)
    assert np.all((p > 1 / math.sqrt(2)) & (p <= 1.0))


@pytest.mark.parametrize("v", [0.5, 0.6, 2.0])
def test_coulomb_coupling_limit(v):
    with pytest.raises(CouplingTooLargeError):
        coulomb_running_p(v)
    with pytest.raises(CouplingTooLargeError):
        coulomb_lower_energy(v, 1.0)


# ---------------------------------------------------------------- P-number sets


def test_p_sets():
    V = PotentialSum.from_coefficients(coulomb=0.2, log=1.0, linear=1.0, quadratic=1.0)
    lower = lower_p_set(V, beta=2.0)
    assert lower[-1.0] == pytest.approx(coulomb_running_p(0.1))
    assert lower[1.0] == 1.2457
    upper = schrodinger_p_set(PotentialSum.from_coefficients(linear=1.0))
    assert upper[1.0] == 1.376084
    var = variational_p_set(V, 1.6)
    assert var[0.0] == pytest.approx(p_variational_log(1.6))
    with pytest.raises(ConfigurationError):
        var[3.0]
    with pytest.raises(ConfigurationError):
        PNumberSet(PKind.VARIATIONAL, {1.0: 1.0})
    with pytest.raises(ConfigurationError):
        PNumberSet(PKind.SCHRODINGER, {1.0: -1.0})


@pytest.mark.slow
def test_computed_p_numbers_reproduce_table():
    assert computed_p_number(PKind.SCHRODINGER, 1.0) == pytest.approx(1.376084, abs=1e-6)
    assert computed_p_number(PKind.RELATIVISTIC_LOWER, 1.0) == pytest.approx(1.2457, abs=1e-4)
    # the lower P never exceeds its exact value (oracle residual subtracted)
    assert computed_p_number(PKind.RELATIVISTIC_LOWER, 1.0) <= (2.2322864 / 2) ** 2


# ---------------------------------------------------------------- Legendre transform


def test_curve_invariants():
    with pytest.raises(InvalidCurveError):
        CouplingCurve([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(InvalidCurveError):
        CouplingCurve([1.0, 2.0, 3.0], [1.0, 4.0, 9.0])  # convex
    with pytest.raises(InvalidCurveError):
        CouplingCurve([1.0, 3.0, 2.0], [1.0, 2.0, 3.0])


def test_transform_of_square_root_curve():
    # F = 2 sqrt(v): s = sqrt(v), hbar = 1/sqrt(v), so hbar(s) = 1/s
    v = np.geomspace(0.25, 4.0, 81)
    pairs = kinetic_potential_from_curve(CouplingCurve(v, 2.0 * np.sqrt(v)))
    s = np.array([p[0] for p in pairs])
    h = np.array([p[1] for p in pairs])
    # three-point differences: second-order error, largest at the ends
    assert np.allclose(s, np.sqrt(v), rtol=1e-3)
    assert np.allclose(h * s, 1.0, rtol=1e-3)
    assert np.all(np.diff(s) > 0)


def test_linear_curve_is_degenerate():
    with pytest.raises(InvalidCurveError):
        kinetic_potential_from_curve(CouplingCurve([1.0, 2.0, 3.0], [2.0, 4.0, 6.0]))


def test_energy_from_kinetic_potential_examples():
    s = np.geomspace(0.05, 20.0, 400)
    samples = [(x, 1.0 / x) for x in s]
    assert energy_from_kinetic_potential(samples, 1.0) == pytest.approx(2.0, abs=1e-6)
    assert energy_from_kinetic_potential(samples, 4.0) == pytest.approx(4.0, abs=1e-6)


def test_energy_boundary_warning():
    samples = [(x, 1.0 / x) for x in (2.0, 3.0, 4.0)]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        energy_from_kinetic_potential(samples, 1.0)
    assert any(issubclass(w.category, BoundaryMinimumWarning) for w in caught)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.4, 3.0))
def test_round_trip_power_law(c, v0):
    # F = c v^(2/3), the p^2 + v r law up to a constant
    v = np.geomspace(0.2, 5.0, 121)
    pairs = kinetic_potential_from_curve(CouplingCurve(v, c * v ** (2.0 / 3.0)))
    got = energy_from_kinetic_potential(pairs, v0)
    assert got == pytest.approx(c * v0 ** (2.0 / 3.0), rel=1e-5)
