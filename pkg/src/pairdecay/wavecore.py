"""Pair wavefunctions of a decaying two-particle system and their guidance fields.

Two variants of the momentum-anticorrelated pair wave are provided.

* The *limit* wave takes the total momentum exactly zero (a delta
  distribution of p1 + p2).  It depends on positions only through the
  relative coordinate r1 - r2 and is not normalisable; we fix its formal
  normalisation constant to 1, so only density ratios, phases and
  velocities are meaningful.

* The *regularized* wave smears the total momentum with a Gaussian of
  width parameter sigma > 0 while keeping the relative-momentum Gaussian
  of width parameter alpha.  It factorizes exactly into a center-of-mass
  packet (width parameter hbar/sigma, mass m1 + m2) times the relative
  packet (width parameter alpha, mass 2*mu), both centered at the origin,
  and is normalisable, so ensembles can be sampled from it.

Natural units with hbar = 1 are used everywhere; SI arithmetic lives in
the regime module only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NodeError
from .packets import HBAR, GaussianPacket

DENSITY_FLOOR = 1e-300


def reduced_mass(m1: float, m2: float) -> float:
    """Reduced mass m1*m2/(m1+m2) of the two fragments."""
    if m1 <= 0.0 or m2 <= 0.0:
        raise DomainError(f"masses must be positive, got m1={m1}, m2={m2}")
    return m1 * m2 / (m1 + m2)


@dataclass(frozen=True)
class DecayParams:
    """Masses and width parameters of the decaying pair.

    alpha is the relative-momentum width parameter (the momentum
    distribution carries exp(-alpha p^2 / hbar)); it sets the scale of the
    initial separation of the fragments.  sigma is the total-momentum
    width parameter (exp(-(p1+p2)^2 / sigma)); sigma = 0 selects the
    delta-correlated limit wave.
    """

    m1: float
    m2: float
    alpha: float
    sigma: float = 0.0
    mu: float = field(init=False)

    def __post_init__(self):
        if self.m1 <= 0.0 or self.m2 <= 0.0:
            raise DomainError("masses must be positive")
        if self.alpha <= 0.0:
            raise DomainError("alpha must be positive")
        if self.sigma < 0.0:
            raise DomainError("sigma must be non-negative")
        object.__setattr__(self, "mu", reduced_mass(self.m1, self.m2))

    @property
    def total_mass(self) -> float:
        return self.m1 + self.m2

    @property
    def cm_width(self) -> float:
        """Width parameter hbar/sigma of the center-of-mass packet."""
        if self.sigma == 0.0:
            return np.inf
        return HBAR / self.sigma


@dataclass(frozen=True)
class PairState:
    """Positions of both fragments at a common time t >= 0."""

    r1: np.ndarray
    r2: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        r1 = np.asarray(self.r1, dtype=float).reshape(3)
        r2 = np.asarray(self.r2, dtype=float).reshape(3)
        object.__setattr__(self, "r1", r1)
        object.__setattr__(self, "r2", r2)
        if not (np.all(np.isfinite(r1)) and np.all(np.isfinite(r2))):
            raise DomainError("positions must be finite")
        if self.t < 0.0:
            raise DomainError("time must be non-negative")

    @property
    def separation(self) -> np.ndarray:
        return self.r1 - self.r2


class WaveVariant(enum.Enum):
    LIMIT = "limit"
    REGULARIZED = "regularized"


@dataclass(frozen=True)
class PairWave:
    """Evaluatable pair wavefunction, limit or regularized variant."""

    variant: WaveVariant
    params: DecayParams

    def __post_init__(self):
        if self.variant is WaveVariant.REGULARIZED and self.params.sigma <= 0.0:
            raise DomainError("regularized variant requires sigma > 0")

    # Packet factors: the relative coordinate spreads as alpha + i t/(2 mu)
    # and the CM coordinate as hbar/sigma + i t/(2 M), i.e. packet masses
    # mu and M in the convention W(t) = W0 + i t/(2 m).

    def relative_packet(self) -> GaussianPacket:
        return GaussianPacket(center=np.zeros(3), width0=complex(self.params.alpha),
                              mass=self.params.mu)

    def cm_packet(self) -> GaussianPacket:
        if self.variant is not WaveVariant.REGULARIZED:
            raise DomainError("limit wave has no center-of-mass packet")
        return GaussianPacket(center=np.zeros(3), width0=complex(self.params.cm_width),
                              mass=self.params.total_mass)

    # -- evaluation ----------------------------------------------------------

    def _split(self, r1, r2):
        r1 = np.asarray(r1, dtype=float)
        r2 = np.asarray(r2, dtype=float)
        m1, m2 = self.params.m1, self.params.m2
        s = r1 - r2
        cm = (m1 * r1 + m2 * r2) / (m1 + m2)
        return s, cm

    def amplitude_arrays(self, r1, r2, t):
        """Complex amplitude for position arrays of shape (..., 3)."""
        s, cm = self._split(r1, r2)
        amp = self.relative_packet().amplitude(s, t)
        if self.variant is WaveVariant.REGULARIZED:
            amp = amp * self.cm_packet().amplitude(cm, t)
        return amp

    def amplitude(self, state: PairState) -> complex:
        return complex(self.amplitude_arrays(state.r1, state.r2, state.t))

    def density_arrays(self, r1, r2, t):
        return np.abs(self.amplitude_arrays(r1, r2, t)) ** 2

    def density(self, state: PairState) -> float:
        return float(self.density_arrays(state.r1, state.r2, state.t))

    def phase(self, state: PairState) -> float:
        """Total phase (in radians, i.e. action / hbar), continuous branch."""
        s = state.separation
        w = self.relative_packet().width_param(state.t)
        ph = (np.dot(s, s) * w.imag / (4.0 * HBAR * np.abs(w) ** 2)
              - 1.5 * np.arctan2(w.imag, w.real))
        if self.variant is WaveVariant.REGULARIZED:
            _, cm = self._split(state.r1, state.r2)
            wc = self.cm_packet().width_param(state.t)
            ph += (np.dot(cm, cm) * wc.imag / (4.0 * HBAR * np.abs(wc) ** 2)
                   - 1.5 * np.arctan2(wc.imag, wc.real))
        return float(ph)

    def velocity_arrays(self, r1, r2, t):
        """Guidance velocities (v1, v2) for arrays of positions, shape (..., 3).

        Closed form from the linear phase gradients of the Gaussian factors:
        the relative part gives opposite contributions scaled by 1/m_i, the
        CM part (regularized only) adds a common drift.
        """
        p = self.params
        s, cm = self._split(r1, r2)
        w = self.relative_packet().width_param(t)
        if np.ndim(w) > 0:
            w = w[..., None]
        rel_term = -np.imag(s / w)
        v1 = rel_term / (2.0 * p.m1)
        v2 = -rel_term / (2.0 * p.m2)
        if self.variant is WaveVariant.REGULARIZED:
            wc = self.cm_packet().width_param(t)
            if np.ndim(wc) > 0:
                wc = wc[..., None]
            cm_term = -np.imag(cm / wc) / (2.0 * p.total_mass)
            v1 = v1 + cm_term
            v2 = v2 + cm_term
        return v1, v2


def limit_wave(params: DecayParams) -> PairWave:
    return PairWave(WaveVariant.LIMIT, params)


def regularized_wave(params: DecayParams) -> PairWave:
    return PairWave(WaveVariant.REGULARIZED, params)


def make_pair_wave(params: DecayParams) -> PairWave:
    """Limit wave when sigma == 0, regularized otherwise."""
    if params.sigma == 0.0:
        return limit_wave(params)
    return regularized_wave(params)


def eval_pair_wave(wave: PairWave, state: PairState) -> complex:
    """Complex amplitude psi(r1, r2, t) of the given wave at the given state."""
    return wave.amplitude(state)


def pair_velocity(wave: PairWave, state: PairState) -> tuple[np.ndarray, np.ndarray]:
    """Guidance velocities (v1, v2) = Re(psi* p_i psi) / (m_i |psi|^2).

    Raises NodeError when the density underflows below the floor: the phase
    gradient is not trustworthy there and trajectory integrators must
    reject the step.
    """
    if wave.density(state) < DENSITY_FLOOR:
        raise NodeError(
            f"density below floor at t={state.t}; guidance velocity undefined")
    v1, v2 = wave.velocity_arrays(state.r1, state.r2, state.t)
    return np.asarray(v1, dtype=float), np.asarray(v2, dtype=float)


# -- density peak diagnostics ---------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Symmetric cubic grid in the collective coordinate m1 r1 + m2 r2.

    The relative separation is held fixed at ``separation`` while the
    collective coordinate scans [-half_width, half_width]^3 with n points
    per axis (odd n puts a node exactly at the origin).
    """

    half_width: float
    n: int
    separation: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))

    def __post_init__(self):
        object.__setattr__(self, "separation",
                           np.asarray(self.separation, dtype=float).reshape(3))
        if self.n < 1:
            raise DomainError("grid needs at least one point per axis")
        if self.half_width <= 0.0:
            raise DomainError("grid half width must be positive")

    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n)


@dataclass(frozen=True)
class PeakReport:
    """Location of the joint-density maximum over a collective-coordinate grid."""

    argmax_collective: np.ndarray
    deviation: float
    degenerate: bool
    peak_density: float
    grid_cell: float
    collective_std_empirical: float
    collective_std_analytic: float | None


def collective_std_analytic(params: DecayParams, t: float) -> float:
    """Per-component std of m1 r1 + m2 r2 under the regularized density.

    Equals sqrt(M^2 hbar^2 / sigma + sigma t^2 / 4): the t = 0 Heisenberg
    width plus momentum-sum spreading, growing quadratically in variance.
    """
    if params.sigma == 0.0:
        raise DomainError("limit wave has no normalisable collective density")
    M = params.total_mass
    return float(np.sqrt(M**2 * HBAR**2 / params.sigma + params.sigma * t**2 / 4.0))


def density_peak_check(wave: PairWave, t: float, grid: GridSpec) -> PeakReport:
    """Locate the argmax of |psi|^2 over a grid of collective coordinates.

    For the regularized wave the maximum sits at m1 r1 + m2 r2 = 0 at every
    time; for the limit wave the density is flat in the collective
    coordinate and the report flags the degeneracy.
    """
    if grid.n < 1:
        raise DomainError("empty grid")
    p = wave.params
    M = p.total_mass
    ax = grid.axis()
    Y1, Y2, Y3 = np.meshgrid(ax, ax, ax, indexing="ij")
    y = np.stack([Y1, Y2, Y3], axis=-1)          # collective coordinate
    s = grid.separation
    r1 = (y + p.m2 * s) / M
    r2 = (y - p.m1 * s) / M
    dens = wave.density_arrays(r1, r2, t)

    flat = dens.reshape(-1)
    k = int(np.argmax(flat))
    argmax = y.reshape(-1, 3)[k]
    peak = float(flat[k])
    spread = float(flat.max() - flat.min())
    degenerate = spread <= 1e-12 * max(peak, DENSITY_FLOOR)
    if degenerate:
        # flat in the collective coordinate: no informative argmax
        argmax = np.zeros(3)

    weights = flat / flat.sum()
    mean = weights @ y.reshape(-1, 3)
    second = weights @ (y.reshape(-1, 3) - mean) ** 2
    std_emp = float(np.sqrt(second.mean()))

    std_ana = None
    if wave.variant is WaveVariant.REGULARIZED:
        std_ana = collective_std_analytic(p, t)

    cell = 2.0 * grid.half_width / max(grid.n - 1, 1)
    return PeakReport(
        argmax_collective=argmax,
        deviation=float(np.linalg.norm(argmax)),
        degenerate=degenerate,
        peak_density=peak,
        grid_cell=cell,
        collective_std_empirical=std_emp,
        collective_std_analytic=std_ana,
    )
