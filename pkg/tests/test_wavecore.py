import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pairdecay import (DecayParams, GridSpec, PairState, WaveVariant,
                       density_peak_check, eval_pair_wave, limit_wave,
                       make_pair_wave, pair_velocity, reduced_mass,
                       regularized_wave)
from pairdecay.errors import DomainError, NodeError
from pairdecay.packets import HBAR

from oracles import fd_pair_velocity, quadrature_pair_wave

finite_mass = st.floats(0.05, 50.0, allow_nan=False)


def test_reduced_mass_values():
    assert reduced_mass(1.0, 1.0) == 0.5
    assert reduced_mass(2.0, 2.0) == 1.0
    assert reduced_mass(1.0, 3.0) == 0.75


@pytest.mark.parametrize("m1,m2", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0)])
def test_reduced_mass_rejects_nonpositive(m1, m2):
    with pytest.raises(DomainError):
        reduced_mass(m1, m2)


@given(finite_mass, finite_mass)
def test_reduced_mass_symmetry_and_bounds(m1, m2):
    mu = reduced_mass(m1, m2)
    assert mu == pytest.approx(reduced_mass(m2, m1))
    assert min(m1, m2) / 2.0 * (1.0 - 1e-12) <= mu <= min(m1, m2)


def test_params_reduced_mass_identity(params_unequal):
    p = params_unequal
    assert 1.0 / p.mu == pytest.approx(1.0 / p.m1 + 1.0 / p.m2, rel=1e-15)


def test_params_validation():
    with pytest.raises(DomainError):
        DecayParams(m1=1.0, m2=1.0, alpha=0.0)
    with pytest.raises(DomainError):
        DecayParams(m1=1.0, m2=1.0, alpha=1.0, sigma=-1.0)
    with pytest.raises(DomainError):
        PairState([0, 0, 0], [0, 0, 0], -1.0)


def test_limit_amplitude_peak(params):
    wave = limit_wave(params)
    amp = eval_pair_wave(wave, PairState([0.2, -0.1, 0.4], [0.2, -0.1, 0.4], 0.0))
    assert abs(amp) == pytest.approx((np.pi * HBAR / params.alpha) ** 1.5, rel=1e-14)
    # global maximum over separations
    other = eval_pair_wave(wave, PairState([0.5, 0, 0], [0, 0, 0], 0.0))
    assert abs(other) < abs(amp)


def test_limit_density_ratio_at_2_hbar_alpha(params):
    # |psi|^2 falls to 1/e of the peak at (r1-r2)^2 = 2 hbar alpha
    wave = limit_wave(params)
    s = np.sqrt(2.0 * HBAR * params.alpha)
    peak = wave.density(PairState([0, 0, 0], [0, 0, 0], 0.0))
    val = wave.density(PairState([s, 0, 0], [0, 0, 0], 0.0))
    assert val / peak == pytest.approx(np.exp(-1.0), rel=1e-12)


def test_log_density_slope_matches_width(params):
    # log density at t=0 is linear in (r1-r2)^2 with slope -1/(2 hbar alpha)
    wave = limit_wave(params)
    s2 = np.linspace(0.1, 4.0, 25)
    logs = [np.log(wave.density(PairState([np.sqrt(v), 0, 0], [0, 0, 0], 0.0)))
            for v in s2]
    slope, intercept = np.polyfit(s2, logs, 1)
    assert slope == pytest.approx(-1.0 / (2.0 * HBAR * params.alpha), abs=1e-12)
    residual = np.max(np.abs(np.polyval([slope, intercept], s2) - logs))
    assert residual < 1e-9


@pytest.mark.parametrize("sigma", [0.0, 0.3, 2.0])
def test_amplitude_matches_quadrature_oracle(sigma, rng):
    params = DecayParams(m1=1.2, m2=0.7, alpha=0.8, sigma=sigma)
    wave = make_pair_wave(params)
    for _ in range(6):
        r1 = rng.normal(0, 0.8, 3)
        r2 = rng.normal(0, 0.8, 3)
        t = rng.uniform(0.0, 2.0)
        got = wave.amplitude_arrays(r1, r2, t)
        want = quadrature_pair_wave(params, r1, r2, t)
        assert got == pytest.approx(want, rel=1e-8)


def test_regularized_cm_width_scales_with_sigma(params_reg):
    # at fixed separation the amplitude decays in r1+r2 as a Gaussian of
    # width proportional to hbar/sqrt(sigma)
    wave = regularized_wave(params_reg)
    sigma = params_reg.sigma
    s = np.array([0.4, 0.0, 0.0])

    def amp_at(cm_x):
        r1 = np.array([cm_x + s[0] / 2, 0.0, 0.0])
        r2 = np.array([cm_x - s[0] / 2, 0.0, 0.0])
        return abs(wave.amplitude_arrays(r1, r2, 0.0))

    xs = np.linspace(0.0, 2.0, 9)
    logs = np.log([amp_at(x) for x in xs])
    slope = np.polyfit(xs**2, logs, 1)[0]
    # CM coordinate equals cm_x here (equal masses), exponent -x^2 sigma/(4 hbar^2)
    assert slope == pytest.approx(-sigma / (4.0 * HBAR**2), rel=1e-10)


@pytest.mark.parametrize("sigma", [1.0, 0.1, 0.01])
def test_regularized_converges_to_limit_times_cm_factor(sigma):
    params = DecayParams(m1=1.0, m2=1.0, alpha=1.0, sigma=sigma)
    reg = regularized_wave(params)
    lim = limit_wave(DecayParams(m1=1.0, m2=1.0, alpha=1.0))
    state = PairState([0.7, 0.2, -0.1], [0.1, -0.3, 0.2], 1.3)
    cm_amp = reg.cm_packet().amplitude(
        (state.r1 + state.r2) / 2.0, state.t)
    got = eval_pair_wave(reg, state)
    want = eval_pair_wave(lim, state) * cm_amp
    assert abs(got / want - 1.0) < 1e-3


def test_velocity_zero_at_t0(params, rng):
    wave = limit_wave(params)
    for _ in range(5):
        st_ = PairState(rng.normal(0, 1, 3), rng.normal(0, 1, 3), 0.0)
        v1, v2 = pair_velocity(wave, st_)
        assert np.allclose(v1, 0.0) and np.allclose(v2, 0.0)


def test_velocity_worked_example():
    # alpha=1, mu=1/2, separation (1,0,0), t=1: v1 = (1/4, 0, 0) = -v2
    params = DecayParams(m1=1.0, m2=1.0, alpha=1.0)
    wave = limit_wave(params)
    st_ = PairState([0.5, 0, 0], [-0.5, 0, 0], 1.0)
    v1, v2 = pair_velocity(wave, st_)
    assert v1 == pytest.approx([0.25, 0.0, 0.0], abs=1e-15)
    assert v2 == pytest.approx([-0.25, 0.0, 0.0], abs=1e-15)


def test_velocity_matches_finite_differences(rng):
    for sigma in (0.0, 0.4):
        params = DecayParams(m1=1.1, m2=0.6, alpha=0.9, sigma=sigma)
        wave = make_pair_wave(params)
        for _ in range(40):
            r1 = rng.normal(0, 0.7, 3)
            r2 = rng.normal(0, 0.7, 3)
            t = rng.uniform(0.05, 2.5)
            v1, v2 = pair_velocity(wave, PairState(r1, r2, t))
            w1, w2 = fd_pair_velocity(wave, r1, r2, t)
            scale = max(np.linalg.norm(w1), np.linalg.norm(w2), 1e-3)
            assert np.linalg.norm(v1 - w1) / scale < 1e-6
            assert np.linalg.norm(v2 - w2) / scale < 1e-6


@settings(max_examples=60)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3),
       st.floats(0.0, 4.0), finite_mass, finite_mass)
def test_momentum_opposition_exact(x, y, z, t, m1, m2):
    params = DecayParams(m1=m1, m2=m2, alpha=1.0)
    wave = limit_wave(params)
    st_ = PairState([x, y, z], [0.1, -0.2, 0.3], t)
    v1, v2 = wave.velocity_arrays(st_.r1, st_.r2, st_.t)
    assert np.max(np.abs(m1 * v1 + m2 * v2)) < 1e-12


def test_amplitude_finite_for_finite_inputs(rng):
    params = DecayParams(m1=1.0, m2=2.0, alpha=0.5, sigma=0.2)
    wave = regularized_wave(params)
    for _ in range(50):
        r1 = rng.uniform(-30, 30, 3)
        r2 = rng.uniform(-30, 30, 3)
        amp = wave.amplitude_arrays(r1, r2, rng.uniform(0, 10))
        assert np.isfinite(amp.real) and np.isfinite(amp.imag)


def test_node_error_below_density_floor(params):
    wave = limit_wave(DecayParams(m1=1.0, m2=1.0, alpha=0.01))
    st_ = PairState([80.0, 0, 0], [-80.0, 0, 0], 0.0)
    with pytest.raises(NodeError):
        pair_velocity(wave, st_)


def test_phase_consistent_with_amplitude(params_reg, rng):
    wave = regularized_wave(params_reg)
    for _ in range(10):
        st_ = PairState(rng.normal(0, 1, 3), rng.normal(0, 1, 3),
                        rng.uniform(0, 3))
        diff = wave.phase(st_) - np.angle(wave.amplitude(st_))
        assert abs((diff + np.pi) % (2 * np.pi) - np.pi) < 1e-10


# -- density peak diagnostics ---------------------------------------------


def test_density_peak_limit_wave_degenerate(params):
    wave = limit_wave(params)
    report = density_peak_check(wave, 0.5, GridSpec(half_width=2.0, n=9))
    assert report.degenerate
    assert report.deviation == 0.0


def test_density_peak_regularized_at_origin(params_reg):
    wave = regularized_wave(params_reg)
    for t in (0.0, 10.0):
        grid = GridSpec(half_width=4.0 * np.sqrt(
            (2.0 * HBAR) ** 2 / params_reg.sigma + params_reg.sigma * t**2 / 4),
            n=21)
        report = density_peak_check(wave, t, grid)
        assert not report.degenerate
        assert report.deviation <= report.grid_cell


def test_density_peak_width_grows_per_growth_law(params_reg):
    wave = regularized_wave(params_reg)
    t = 6.0
    std = np.sqrt((2.0 * HBAR) ** 2 / params_reg.sigma
                  + params_reg.sigma * t**2 / 4.0)
    grid = GridSpec(half_width=5.0 * std, n=41)
    report = density_peak_check(wave, t, grid)
    assert report.collective_std_analytic == pytest.approx(std, rel=1e-12)
    assert report.collective_std_empirical == pytest.approx(std, rel=0.02)


def test_density_peak_empty_grid_rejected(params_reg):
    with pytest.raises(DomainError):
        GridSpec(half_width=1.0, n=0)


def test_variant_selection():
    limit = make_pair_wave(DecayParams(m1=1, m2=1, alpha=1.0))
    assert limit.variant is WaveVariant.LIMIT
    reg = make_pair_wave(DecayParams(m1=1, m2=1, alpha=1.0, sigma=0.1))
    assert reg.variant is WaveVariant.REGULARIZED
    with pytest.raises(DomainError):
        regularized_wave(DecayParams(m1=1, m2=1, alpha=1.0))
