"""Quantum-equilibrium ensembles: sampling, propagation, and spreading statistics.

Sampling uses the regularized wave only (the limit wave is not
normalisable).  At t = 0 the density factorizes into independent isotropic
Gaussians for the relative separation (per-component variance hbar*alpha)
and the center of mass (variance hbar^2/sigma), so sampling is exact, with
no rejection.  Propagation multiplies each coordinate by the packet width
ratio, which is the exact guidance flow for centered Gaussian packets; RK4
spot checks in the test suite guard the shortcut.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedVariantError
from .packets import HBAR
from .wavecore import DecayParams, PairWave, collective_std_analytic, regularized_wave


@dataclass(frozen=True)
class EnsembleSpec:
    """Sample count, RNG seed and decay parameters (sigma > 0 required)."""

    n: int
    seed: int
    params: DecayParams

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("ensemble needs at least one sample")
        if self.params.sigma <= 0.0:
            raise UnsupportedVariantError(
                "equilibrium sampling requires sigma > 0 (normalisable wave)")


@dataclass(frozen=True)
class PairEnsemble:
    """Vectorised batch of pair states sharing a common time.

    Realises the sampled ensemble as (n, 3) position arrays rather than a
    python list of states; rows are i.i.d. quantum-equilibrium draws.
    """

    r1: np.ndarray
    r2: np.ndarray
    t: float
    params: DecayParams

    @property
    def n(self) -> int:
        return len(self.r1)

    @property
    def separation(self) -> np.ndarray:
        return self.r1 - self.r2

    @property
    def collective(self) -> np.ndarray:
        return self.params.m1 * self.r1 + self.params.m2 * self.r2


def _streams(spec: EnsembleSpec):
    """Independent child generators: positions, momenta, auxiliary."""
    root = np.random.default_rng(spec.seed)
    return root.spawn(3)


def sample_equilibrium(spec: EnsembleSpec) -> PairEnsemble:
    """Draw n i.i.d. pair states from |psi(., 0)|^2 of the regularized wave."""
    pos_rng, _, _ = _streams(spec)
    p = spec.params
    s0 = pos_rng.normal(0.0, np.sqrt(HBAR * p.alpha), size=(spec.n, 3))
    cm0 = pos_rng.normal(0.0, HBAR / np.sqrt(p.sigma), size=(spec.n, 3))
    M = p.total_mass
    return PairEnsemble(r1=cm0 + p.m2 / M * s0, r2=cm0 - p.m1 / M * s0,
                        t=0.0, params=p)


def sample_momenta(spec: EnsembleSpec) -> tuple[np.ndarray, np.ndarray]:
    """Draw (p1, p_total) from the squared momentum distribution |F|^2.

    Per component, p_total is Gaussian with variance sigma/4 and the
    relative momentum Gaussian with variance hbar/(4 alpha); particle one
    carries p1 = (m1/M) p_total + p_rel.  The draw is stationary: the same
    arrays describe the momenta at every time.
    """
    _, mom_rng, _ = _streams(spec)
    p = spec.params
    p_total = mom_rng.normal(0.0, np.sqrt(p.sigma) / 2.0, size=(spec.n, 3))
    p_rel = mom_rng.normal(0.0, np.sqrt(HBAR / (4.0 * p.alpha)), size=(spec.n, 3))
    p1 = p.m1 / p.total_mass * p_total + p_rel
    return p1, p_total


def propagate(sample: PairEnsemble, t: float) -> PairEnsemble:
    """Exact guidance flow of the equilibrium ensemble to time t.

    Relative and CM coordinates scale by their packet width ratios; this is
    the closed-form Bohmian evolution for the factorized Gaussian wave.
    """
    if t < sample.t:
        raise DomainError("propagation runs forward in time only")
    wave = regularized_wave(sample.params)
    rel_scale = wave.relative_packet().flow_scale(sample.t, t)
    cm_scale = wave.cm_packet().flow_scale(sample.t, t)
    p = sample.params
    M = p.total_mass
    s = sample.separation * rel_scale
    cm = (p.m1 * sample.r1 + p.m2 * sample.r2) / M * cm_scale
    return PairEnsemble(r1=cm + p.m2 / M * s, r2=cm - p.m1 / M * s, t=t, params=p)


# -- variance evolution ------------------------------------------------------


@dataclass(frozen=True)
class VarianceReport:
    """Collective-coordinate variance at one time: analytic vs Monte Carlo."""

    t: float
    analytic: float
    empirical: float
    std_error: float

    def to_record(self) -> dict:
        return {"t": self.t, "analytic": self.analytic,
                "empirical": self.empirical, "se": self.std_error}


def collective_variance_analytic(params: DecayParams, t: float) -> float:
    """Per-component variance of m1 r1 + m2 r2 at time t.

    Initial value (m1+m2)^2 hbar^2 / sigma plus quadratic growth
    (sigma/4) t^2 from the stationary momentum-sum variance.
    """
    return collective_std_analytic(params, t) ** 2


def collective_variance(spec: EnsembleSpec, t: float) -> VarianceReport:
    """Monte Carlo collective variance against the analytic growth law.

    The three Cartesian components are i.i.d., so they are pooled; the
    standard error uses the chi-squared variance of a sample variance.
    """
    sample = propagate(sample_equilibrium(spec), t)
    values = sample.collective.ravel()
    emp = float(np.var(values, ddof=1))
    se = emp * np.sqrt(2.0 / (values.size - 1))
    return VarianceReport(t=t, analytic=collective_variance_analytic(spec.params, t),
                          empirical=emp, std_error=float(se))


def write_variance_reports_json(reports, path) -> None:
    with open(path, "w") as fh:
        json.dump([r.to_record() for r in reports], fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- uncertainty product -------------------------------------------------------


@dataclass(frozen=True)
class HeisenbergReport:
    """Uncertainty product of (p1+p2, m1 r1 + m2 r2) over hbar (m1+m2)/2."""

    analytic_ratio: float
    mc_ratio: float
    mc_std_error: float


def heisenberg_product(spec: EnsembleSpec) -> HeisenbergReport:
    """Product Delta(p1+p2) * Delta(m1 r1 + m2 r2) at t = 0, normalised.

    The factorized Gaussian wave is a minimum-uncertainty state of the
    collective pair (variances sigma/4 and M^2 hbar^2/sigma), so the
    analytic ratio is exactly 1 and the bound ratio >= 1 can never be
    violated.
    """
    p = spec.params
    M = p.total_mass
    var_p = p.sigma / 4.0
    var_x = M**2 * HBAR**2 / p.sigma
    analytic = np.sqrt(var_p * var_x) / (HBAR * M / 2.0)

    sample = sample_equilibrium(spec)
    _, p_total = sample_momenta(spec)
    vx = np.var(sample.collective.ravel(), ddof=1)
    vp = np.var(p_total.ravel(), ddof=1)
    mc = np.sqrt(vx * vp) / (HBAR * M / 2.0)
    # delta method: rel var of sqrt(vx*vp) = (relvar(vx) + relvar(vp))/4
    m = 3 * spec.n
    rel_se = np.sqrt(2.0 * (2.0 / (m - 1)) / 4.0)
    return HeisenbergReport(analytic_ratio=float(analytic), mc_ratio=float(mc),
                            mc_std_error=float(mc * rel_se))


# -- scattering into cones ----------------------------------------------------


@dataclass(frozen=True)
class ConeSpec:
    """Cone with apex at the origin: unit axis and half angle in (0, pi]."""

    axis: np.ndarray
    half_angle: float

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float).reshape(3)
        norm = np.linalg.norm(axis)
        if norm == 0.0:
            raise DomainError("cone axis must be non-zero")
        object.__setattr__(self, "axis", axis / norm)
        if not 0.0 < self.half_angle <= np.pi:
            raise DomainError("half angle must lie in (0, pi]")


@dataclass(frozen=True)
class ConeReport:
    position_fraction: float
    momentum_fraction: float
    std_error: float


def _fraction_in_cone(vectors: np.ndarray, cone: ConeSpec) -> float:
    norms = np.linalg.norm(vectors, axis=1)
    norms[norms == 0.0] = np.inf
    cosines = vectors @ cone.axis / norms
    return float(np.mean(cosines >= np.cos(cone.half_angle)))


def cone_probability_check(spec: EnsembleSpec, cone: ConeSpec, t: float) -> ConeReport:
    """Fraction of particle-1 positions (relative to the CM) vs momenta in a cone.

    The asymptotic equality of the two fractions is the scattering-into-
    cones property; for this isotropic wave both equal the solid-angle
    fraction of the cone.
    """
    if t <= 0.0:
        raise DomainError("cone check needs t > 0")
    sample = propagate(sample_equilibrium(spec), t)
    rel_pos = sample.r1 - (sample.collective / sample.params.total_mass)
    p1, _ = sample_momenta(spec)
    f_pos = _fraction_in_cone(rel_pos, cone)
    f_mom = _fraction_in_cone(p1, cone)
    se = np.sqrt(f_pos * (1 - f_pos) / spec.n + f_mom * (1 - f_mom) / spec.n)
    return ConeReport(position_fraction=f_pos, momentum_fraction=f_mom,
                      std_error=float(se))


# -- angular deviation ---------------------------------------------------------


@dataclass(frozen=True)
class AngularDeviationReport:
    tan_theta_estimate: float
    small_t_asymptote: float
    large_t_asymptote: float
    crossover_time: float


def angular_deviation(spec: EnsembleSpec, t: float) -> AngularDeviationReport:
    """Angular spread tan(theta) = L(t)/R(t) of the equal-mass pair.

    L(t) is the per-component spread of r1 + r2 (Monte Carlo, pooled
    components) and R(t) = p_mean t / m the distance travelled.  The small
    time asymptote is source-dominated, the large time asymptote is the
    momentum-spread angle; they cross at t = L(0) m / Delta(p1+p2).
    """
    p = spec.params
    if not np.isclose(p.m1, p.m2):
        raise DomainError("angular deviation assumes equal masses")
    if t <= 0.0:
        raise DomainError("distance travelled vanishes at t = 0")
    m = p.m1
    sample = propagate(sample_equilibrium(spec), t)
    l_t = float(np.std((sample.r1 + sample.r2).ravel(), ddof=1))

    p1, p_total = sample_momenta(spec)
    p_mean = float(np.mean(np.linalg.norm(p1, axis=1)))
    distance = p_mean * t / m

    l0 = 2.0 * HBAR / np.sqrt(p.sigma)
    dp_sum = np.sqrt(p.sigma) / 2.0
    return AngularDeviationReport(
        tan_theta_estimate=l_t / distance,
        small_t_asymptote=l0 * m / (p_mean * t),
        large_t_asymptote=dp_sum / p_mean,
        crossover_time=l0 * m / dp_sum,
    )
