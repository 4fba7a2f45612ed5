import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pairdecay import (ConeSpec, DecayParams, EnsembleSpec, angular_deviation,
                       collective_variance, collective_variance_analytic,
                       cone_probability_check, heisenberg_product, propagate,
                       sample_equilibrium, sample_momenta)
from pairdecay.errors import DomainError, UnsupportedVariantError
from pairdecay.packets import HBAR

from oracles import gaussian_density_variance


def spec_for(n=100_000, seed=1, sigma=0.5, alpha=1.0, m1=1.0, m2=1.0):
    return EnsembleSpec(n=n, seed=seed,
                        params=DecayParams(m1=m1, m2=m2, alpha=alpha, sigma=sigma))


def test_spec_requires_normalisable_wave():
    with pytest.raises(UnsupportedVariantError):
        spec_for(sigma=0.0)
    with pytest.raises(DomainError):
        EnsembleSpec(n=0, seed=1, params=DecayParams(m1=1, m2=1, alpha=1, sigma=1))


def test_gaussian_moments_against_quadrature():
    # frozen analytic moments validated independently by quadrature:
    # Var(P_j) from density exp(-2 P^2/sigma) and Var(s_j) from
    # exp(-s^2/(2 hbar alpha))
    sigma, alpha = 0.7, 1.3
    assert gaussian_density_variance(2.0 / sigma) == pytest.approx(sigma / 4.0, rel=1e-9)
    assert gaussian_density_variance(1.0 / (2.0 * HBAR * alpha)) == pytest.approx(
        HBAR * alpha, rel=1e-9)
    # CM coordinate: density exp(-R^2 sigma/(2 hbar^2)) -> Var hbar^2/sigma
    assert gaussian_density_variance(sigma / (2.0 * HBAR**2)) == pytest.approx(
        HBAR**2 / sigma, rel=1e-9)


def test_sample_moments():
    spec = spec_for(seed=5)
    sample = sample_equilibrium(spec)
    p = spec.params
    n = spec.n

    coll = sample.collective.ravel()
    se_mean = coll.std(ddof=1) / np.sqrt(coll.size)
    assert abs(coll.mean()) < 4.0 * se_mean

    sep = sample.separation.ravel()
    var = sep.var(ddof=1)
    se_var = var * np.sqrt(2.0 / (sep.size - 1))
    assert abs(var - HBAR * p.alpha) < 4.0 * se_var


def test_fixed_seed_bit_identical():
    a = sample_equilibrium(spec_for(n=1000, seed=7))
    b = sample_equilibrium(spec_for(n=1000, seed=7))
    assert np.array_equal(a.r1, b.r1) and np.array_equal(a.r2, b.r2)
    c = sample_equilibrium(spec_for(n=1000, seed=8))
    assert not np.array_equal(a.r1, c.r1)


def test_propagation_scales_coordinates():
    spec = spec_for(n=500, seed=2)
    sample = sample_equilibrium(spec)
    p = spec.params
    t = 3.0
    moved = propagate(sample, t)
    rel_scale = np.sqrt(p.alpha**2 + t**2 / (4 * p.mu**2)) / p.alpha
    assert np.allclose(moved.separation, sample.separation * rel_scale)
    with pytest.raises(DomainError):
        propagate(moved, 1.0)


def test_collective_variance_analytic_structure():
    p = DecayParams(m1=1.0, m2=2.0, alpha=0.8, sigma=0.6)
    v0 = collective_variance_analytic(p, 0.0)
    assert v0 == pytest.approx((p.m1 + p.m2) ** 2 * HBAR**2 / p.sigma, rel=1e-14)
    for t in (0.5, 2.0, 40.0):
        growth = collective_variance_analytic(p, t) - v0
        assert growth == pytest.approx(p.sigma / 4.0 * t**2, rel=1e-12)


def test_collective_variance_monte_carlo():
    spec = spec_for(seed=11)
    for t in (0.0, 5.0, 50.0):
        rep = collective_variance(spec, t)
        assert abs(rep.empirical - rep.analytic) < 3.0 * rep.std_error


def test_variance_growth_parabola_fit():
    p = DecayParams(m1=1.0, m2=1.0, alpha=1.0, sigma=0.9)
    ts = np.array([0.0, 7.0, 29.0])
    vals = np.array([collective_variance_analytic(p, t) for t in ts])
    coeffs = np.polyfit(ts, vals, 2)
    check_ts = np.array([3.0, 11.0, 101.0])
    got = np.polyval(coeffs, check_ts)
    want = np.array([collective_variance_analytic(p, t) for t in check_ts])
    assert np.max(np.abs(got / want - 1.0)) < 1e-12


def test_heisenberg_product_minimum_uncertainty():
    rep = heisenberg_product(spec_for(seed=3))
    assert abs(rep.analytic_ratio - 1.0) < 1e-9
    assert abs(rep.mc_ratio - 1.0) < 3.0 * rep.mc_std_error


@settings(max_examples=40)
@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_heisenberg_bound_never_violated(sigma, alpha):
    rep = heisenberg_product(spec_for(n=10, seed=1, sigma=sigma, alpha=alpha))
    assert rep.analytic_ratio >= 1.0 - 1e-9


def test_cone_full_sphere():
    spec = spec_for(n=2000, seed=9)
    rep = cone_probability_check(spec, ConeSpec(axis=[0, 0, 1], half_angle=np.pi),
                                 t=1.0)
    assert rep.position_fraction == 1.0
    assert rep.momentum_fraction == 1.0


def test_cone_solid_angle_fraction():
    spec = spec_for(seed=13)
    theta = np.deg2rad(30.0)
    rep = cone_probability_check(spec, ConeSpec(axis=[0, 1, 0], half_angle=theta),
                                 t=1.0)
    want = (1.0 - np.cos(theta)) / 2.0
    se = np.sqrt(want * (1 - want) / spec.n)
    assert abs(rep.momentum_fraction - want) < 3.0 * se


def test_cone_position_matches_momentum_asymptotically():
    spec = spec_for(seed=17)
    p = spec.params
    t = 100.0 * 2.0 * p.mu * p.alpha
    for deg in (10.0, 30.0, 60.0):
        rep = cone_probability_check(
            spec, ConeSpec(axis=[0.3, -0.5, 0.8], half_angle=np.deg2rad(deg)), t)
        assert abs(rep.position_fraction - rep.momentum_fraction) < 3.0 * rep.std_error


def test_cone_validation():
    spec = spec_for(n=10, seed=1)
    with pytest.raises(DomainError):
        cone_probability_check(spec, ConeSpec(axis=[0, 0, 1], half_angle=1.0), 0.0)
    with pytest.raises(DomainError):
        ConeSpec(axis=[0, 0, 0], half_angle=1.0)
    with pytest.raises(DomainError):
        ConeSpec(axis=[0, 0, 1], half_angle=4.0)


def test_angular_deviation_asymptotes():
    spec = spec_for(seed=23, sigma=0.4, alpha=1.0)
    cross = angular_deviation(spec, 1.0).crossover_time
    late = angular_deviation(spec, 400.0 * cross)
    assert late.tan_theta_estimate / late.large_t_asymptote == pytest.approx(1.0, abs=0.05)
    early = angular_deviation(spec, cross / 400.0)
    assert early.tan_theta_estimate / early.small_t_asymptote == pytest.approx(1.0, abs=0.05)
    # crossover: both asymptotes agree there
    at_cross = angular_deviation(spec, cross)
    assert at_cross.small_t_asymptote == pytest.approx(at_cross.large_t_asymptote,
                                                       rel=1e-12)
    p = spec.params
    assert cross == pytest.approx(
        (2.0 * HBAR / np.sqrt(p.sigma)) * p.m1 / (np.sqrt(p.sigma) / 2.0), rel=1e-12)


def test_angular_deviation_validation():
    with pytest.raises(DomainError):
        angular_deviation(spec_for(n=10, seed=1), 0.0)
    with pytest.raises(DomainError):
        angular_deviation(spec_for(n=10, seed=1, m1=1.0, m2=2.0), 1.0)


def test_standard_quantum_limit():
    p = DecayParams(m1=1.0, m2=1.0, alpha=1.0, sigma=0.5)
    m = p.m1
    for t in (0.0, 0.1, 1.0, 10.0, 1000.0):
        var_sum = 4.0 * HBAR**2 / p.sigma + p.sigma * t**2 / (p.m1 + p.m2) ** 2
        assert var_sum >= 2.0 * HBAR * t / m - 1e-12 * max(var_sum, 1.0)


def test_momentum_sum_variance_stationary():
    spec = spec_for(seed=29)
    _, p_total_a = sample_momenta(spec)
    _, p_total_b = sample_momenta(spec)
    # the momentum draw is one stationary datum, identical at every time
    assert np.array_equal(p_total_a, p_total_b)
    var = p_total_a.ravel().var(ddof=1)
    se = var * np.sqrt(2.0 / (p_total_a.size - 1))
    assert abs(var - spec.params.sigma / 4.0) < 3.0 * se
