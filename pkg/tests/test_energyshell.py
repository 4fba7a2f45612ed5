import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from pairdecay import (ConvolutionGrid, EnergyBand, band_current_check,
                       band_edges, bessel_j0, bessel_j1, bessel_j2,
                       energy_band_convolution, g_profile, h_alpha_for_fwhm,
                       h_profile)
from pairdecay.energyshell import RadialProfile
from pairdecay.errors import DomainError, NumericError, ResolutionError

PAPER_BAND = EnergyBand(E_plus=0.02, E_minus=0.999 * 0.02)


# -- Bessel functions -----------------------------------------------------------


def test_bessel_j1_frozen_values():
    assert bessel_j1(0.0) == 0.0
    assert bessel_j1(1.0) == pytest.approx(0.4400505857, abs=1e-10)
    assert bessel_j1(5.0) == pytest.approx(-0.3275791376, abs=1e-10)


def test_bessel_absolute_accuracy_across_domain():
    xs = np.linspace(-100.0, 100.0, 40001)
    assert np.max(np.abs(bessel_j1(xs) - special.j1(xs))) < 1e-10
    assert np.max(np.abs(bessel_j0(xs) - special.j0(xs))) < 1e-10
    assert np.max(np.abs(bessel_j2(xs) - special.jn(2, xs))) < 1e-10


def test_bessel_parity():
    xs = np.linspace(0.1, 40.0, 100)
    assert np.allclose(bessel_j1(-xs), -bessel_j1(xs))
    assert np.allclose(bessel_j0(-xs), bessel_j0(xs))


@settings(max_examples=100)
@given(st.floats(0.05, 100.0))
def test_bessel_recurrence(x):
    # J0(x) + J2(x) = 2 J1(x) / x
    assert bessel_j0(x) + bessel_j2(x) == pytest.approx(2.0 * bessel_j1(x) / x,
                                                        abs=1e-9)


# -- band edges -------------------------------------------------------------------


def test_band_edges_published_values():
    edges = band_edges(PAPER_BAND)
    assert edges.a_plus == pytest.approx(5.58309, abs=1e-4)
    # formula value for the lower edge; the often-quoted 5.58023 is
    # inconsistent with a+ sqrt(0.999) at the 1e-4 level
    assert edges.a_minus == pytest.approx(5.5803, abs=2e-4)
    assert edges.a_minus == pytest.approx(edges.a_plus * np.sqrt(0.999), rel=1e-12)


def test_band_edges_zero_energy():
    band = EnergyBand(E_plus=0.02, E_minus=0.0)
    assert band_edges(band).a_minus == 0.0


def test_band_validation():
    with pytest.raises(DomainError):
        EnergyBand(E_plus=0.01, E_minus=0.02)
    with pytest.raises(DomainError):
        EnergyBand(E_plus=0.01, E_minus=0.01)


def test_band_edges_lambda_c_scaling():
    scaled = EnergyBand(E_plus=0.02, E_minus=0.0199, lambda_c=2.0)
    unscaled = EnergyBand(E_plus=0.02, E_minus=0.0199)
    assert band_edges(scaled).a_plus == pytest.approx(
        band_edges(unscaled).a_plus / 2.0)


# -- profiles ---------------------------------------------------------------------


def test_g_profile_origin_limit():
    xs = np.array([0.0, 1e-9, 0.01])
    prof = g_profile(PAPER_BAND, xs)
    a_plus, a_minus = band_edges(PAPER_BAND)
    want = 0.5 * (a_plus**2 - a_minus**2)
    assert prof.values[0] == pytest.approx(want, rel=1e-12)
    assert prof.values[1] == pytest.approx(want, rel=1e-6)


def test_g_profile_peak_at_origin_with_decaying_oscillations():
    xs = np.linspace(1e-3, 100.0, 20000)
    prof = g_profile(PAPER_BAND, xs)
    a_plus, a_minus = band_edges(PAPER_BAND)
    g0 = 0.5 * (a_plus**2 - a_minus**2)
    assert np.max(np.abs(prof.values)) <= g0
    # oscillatory: many sign changes over the window
    assert np.count_nonzero(np.diff(np.sign(prof.values))) > 100
    # envelope decays between the first and the last quarter
    first = np.max(np.abs(prof.values[xs < 25.0]))
    last = np.max(np.abs(prof.values[xs > 75.0]))
    assert last < first


def test_g_profile_probability_concentrated_near_origin():
    # over half of the radial g^2 weight on (0, 100] falls within 10: the
    # central peak plus the slowly decaying envelope keep the profile
    # concentrated within a few length units of the origin
    xs = np.linspace(1e-4, 100.0, 400000)
    g = g_profile(PAPER_BAND, xs).values
    weight = g**2
    total = np.trapezoid(weight, xs)
    inner = np.trapezoid(weight[xs <= 10.0], xs[xs <= 10.0])
    assert inner / total >= 0.5


def test_g_profile_zero_crossing_interlacing():
    # zeros of g interlace those of J1(a+ x) for the narrow band
    a_plus, _ = band_edges(PAPER_BAND)
    j1_zeros = special.jn_zeros(1, 11) / a_plus
    xs = np.linspace(1e-4, j1_zeros[-1], 200000)
    g = g_profile(PAPER_BAND, xs).values
    sign_flip = np.nonzero(np.diff(np.sign(g)))[0]
    g_zeros = xs[sign_flip][:10]
    for k in range(10):
        lo = j1_zeros[k - 1] if k else 0.0
        assert lo < g_zeros[k] < j1_zeros[k] * 1.05


def test_h_profile_gaussian_fwhm():
    fwhm = 20.0
    alpha = h_alpha_for_fwhm(fwhm)
    xs = np.linspace(0.0, 60.0, 120001)
    prof = h_profile(alpha, 0.0, 0.5, xs)
    dens = np.abs(prof.values) ** 2
    assert np.argmax(dens) == 0
    half = np.interp(0.5, (dens / dens[0])[::-1], xs[::-1])
    assert 2.0 * half == pytest.approx(fwhm, rel=0.01)


def test_h_profile_width_grows_with_time():
    alpha = h_alpha_for_fwhm(20.0)
    xs = np.linspace(0.0, 200.0, 4001)
    d0 = np.abs(h_profile(alpha, 0.0, 0.5, xs).values) ** 2
    dt = np.abs(h_profile(alpha, 500.0, 0.5, xs).values) ** 2
    width = lambda d: np.sqrt(np.trapezoid(xs**2 * d, xs) / np.trapezoid(d, xs))
    assert width(dt) > width(d0)


def test_radial_profile_validation():
    with pytest.raises(DomainError):
        RadialProfile(xs=np.array([1.0, 1.0]), values=np.array([0.0, 0.0]))
    with pytest.raises(DomainError):
        RadialProfile(xs=np.array([0.0, 1.0]), values=np.array([np.inf, 0.0]))


# -- convolution ------------------------------------------------------------------


def test_convolution_broad_h_passes_through():
    alpha = h_alpha_for_fwhm(20.0)
    report = energy_band_convolution(PAPER_BAND, alpha, 0.0)
    assert report.dev_to_h < 0.05
    assert report.dev_to_g > 0.5


def test_convolution_narrow_h_reproduces_band_kernel():
    grid = ConvolutionGrid()
    report = energy_band_convolution(PAPER_BAND, 5e-4, 0.0, grid)
    assert report.dev_to_g < 0.05
    assert report.dev_to_h > 0.5


def test_convolution_improves_with_band_width():
    alpha = h_alpha_for_fwhm(20.0)
    devs = []
    for e_plus in (0.02, 0.08, 0.32):
        band = EnergyBand(E_plus=e_plus, E_minus=0.999 * e_plus)
        devs.append(energy_band_convolution(band, alpha, 0.0).dev_to_h)
    assert devs[0] > devs[1] > devs[2]


def test_convolution_commutes():
    alpha = h_alpha_for_fwhm(20.0)
    a = energy_band_convolution(PAPER_BAND, alpha, 0.0)
    b = energy_band_convolution(PAPER_BAND, alpha, 0.0, swapped=True)
    scale = np.max(np.abs(a.conv.values))
    assert np.max(np.abs(a.conv.values - b.conv.values)) < 1e-10 * scale


def test_convolution_rejects_coarse_grid():
    with pytest.raises(ResolutionError):
        energy_band_convolution(PAPER_BAND, 1.0, 0.0,
                                ConvolutionGrid(half_width=140.0, n=2048))


# -- zero-current property -----------------------------------------------------


def test_band_current_zero_at_t0():
    points = np.linspace(0.2, 2.0, 60)
    speed = band_current_check(PAPER_BAND, alpha=1.0, t=0.0, points=points)
    assert speed < 1e-9


def test_band_current_positive_at_later_times():
    points = np.linspace(0.2, 2.0, 60)
    speed = band_current_check(PAPER_BAND, alpha=1.0, t=5.0, points=points)
    assert speed > 1e-6


def test_band_current_vanishes_with_band_width():
    # halving the energy gap at least halves the maximum speed; the actual
    # stable decay is quadratic (factor 4): the evolution phase is symmetric
    # about the band center, so the linear moment of the gap cancels
    points = np.linspace(0.2, 2.0, 60)
    speeds = []
    for gap in (0.002, 0.001, 0.0005):
        band = EnergyBand(E_plus=0.02, E_minus=(1.0 - gap) * 0.02)
        speeds.append(band_current_check(band, alpha=1.0, t=5.0, points=points))
    for ratio in (speeds[0] / speeds[1], speeds[1] / speeds[2]):
        assert ratio >= 1.6
        assert ratio == pytest.approx(4.0, rel=0.15)


def test_band_current_quadrature_convergence_guard():
    wide = EnergyBand(E_plus=0.32, E_minus=0.01)
    points = np.linspace(5.0, 90.0, 10)
    with pytest.raises(NumericError):
        band_current_check(wide, alpha=1.0, t=5.0, points=points, n_nodes=4)


def test_band_current_validation():
    with pytest.raises(DomainError):
        band_current_check(PAPER_BAND, alpha=1.0, t=0.0, points=np.array([]))
