"""Unfolded thin-lens coincidence imaging of a decaying pair.

Geometry: the lens sits at the origin with its optical axis along
``lens.axis``.  Particle 1 travels toward the detection/aperture plane at
axial distance S; particle 2 travels the other way, crosses the lens and
is scanned in the conjugate plane at distance S' on the far side.  The
decay region is centered on the axis between the lens and the aperture
plane (midway by default).

The quantum mechanics is carried entirely by complex-Gaussian packets:

* detection of particle 1 at a point collapses the pair wave onto a
  one-particle packet for particle 2 (an exact product of the relative
  and center-of-mass factors evaluated at the detection point), which in
  the well-correlated limit is the spherical wave centered on the
  detection point;
* the thin lens applies the quadratic phase kick to the transverse packet
  (the q-parameter transformation), turning the diverging packet into a
  converging one whose focus obeys the conjugate equation and whose
  transverse center is the geometric image point;
* every Bohmian propagation step is the exact affine flow of a Gaussian
  packet, so no per-sample ODE integration is required.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (DomainError, EmptyImageError, InfiniteConjugateError,
                     NodeError)
from .ensemble import EnsembleSpec, sample_equilibrium
from .packets import HBAR, GaussianPacket, lens_kick, multiply_packets
from .trajectories import Trajectory, _rk4_step
from .wavecore import DENSITY_FLOOR, DecayParams


# -- thin-lens geometry -------------------------------------------------------


class ConjugateImage(NamedTuple):
    distance: float
    virtual: bool


def thin_lens_conjugate(S: float, f: float) -> ConjugateImage:
    """Image-side conjugate distance S' with 1/S + 1/S' = 1/f.

    S inside the focal distance gives a virtual image, reported as a
    negative distance with the ``virtual`` flag set.
    """
    if S <= 0.0 or f <= 0.0:
        raise DomainError("object distance and focal length must be positive")
    if S == f:
        raise InfiniteConjugateError("object at the focal plane images at infinity")
    s_prime = 1.0 / (1.0 / f - 1.0 / S)
    return ConjugateImage(distance=s_prime, virtual=s_prime < 0.0)


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(3)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise DomainError("zero vector cannot be normalised")
    return v / n


def transverse_basis(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic right-handed orthonormal pair perpendicular to axis."""
    axis = _unit(axis)
    ref = np.array([1.0, 0.0, 0.0]) if abs(axis[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = _unit(ref - np.dot(ref, axis) * axis)
    return e1, np.cross(axis, e1)


@dataclass(frozen=True)
class LensSetup:
    """Focal length and conjugate planes; S_prime is derived when omitted."""

    f: float
    S: float
    S_prime: float | None = None
    axis: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        object.__setattr__(self, "axis", _unit(self.axis))
        if self.f <= 0.0 or self.S <= 0.0:
            raise DomainError("focal length and object distance must be positive")
        if self.S_prime is None:
            object.__setattr__(self, "S_prime", thin_lens_conjugate(self.S, self.f).distance)
        else:
            lhs = 1.0 / self.S + 1.0 / self.S_prime
            if abs(lhs - 1.0 / self.f) > 1e-12 * abs(1.0 / self.f):
                raise DomainError("S and S_prime do not satisfy the conjugate equation")

    @property
    def magnification(self) -> float:
        return self.S_prime / self.S


def lens_image_point(source: np.ndarray, lens: LensSetup) -> np.ndarray:
    """Geometric image of a point source in the object plane at distance S.

    The image lies in the conjugate plane on the far side, on the straight
    line through the lens center, so its transverse coordinate is
    -(S'/S) times the source's.
    """
    source = np.asarray(source, dtype=float).reshape(3)
    axial = float(np.dot(source, lens.axis))
    if abs(axial - lens.S) > 1e-9 * max(lens.S, 1.0):
        raise DomainError("source must lie in the object plane at distance S")
    return -(lens.S_prime / lens.S) * source


# -- collapse ------------------------------------------------------------------


@dataclass(frozen=True)
class SphericalWave:
    """Effective one-particle wave after detecting the partner at center_a.

    A spreading Gaussian exp(-(a - r)^2 / (4 hbar (alpha + i t/(2 m))))
    whose equal-phase surfaces are spheres centered on the detection point
    and whose guidance field is radial from it.  t0 records the collapse
    time; the width clock runs from the decay, like the pair wave's.
    """

    center_a: np.ndarray
    alpha: float
    t0: float
    mass: float

    def __post_init__(self):
        object.__setattr__(self, "center_a",
                           np.asarray(self.center_a, dtype=float).reshape(3))
        if self.alpha <= 0.0:
            raise DomainError("alpha must be positive")
        if self.mass <= 0.0:
            raise DomainError("mass must be positive")

    def packet(self) -> GaussianPacket:
        return GaussianPacket(center=self.center_a.astype(complex),
                              width0=complex(self.alpha), mass=self.mass)

    def amplitude(self, r, t):
        return self.packet().amplitude(r, t)

    def phase(self, r, t):
        """Total phase in radians, including the -(3/2) arctan(t/(2 m alpha)) term."""
        return np.imag(self.packet().log_amplitude(r, t))

    def velocity(self, r, t):
        dens = np.abs(self.amplitude(r, t)) ** 2
        if np.any(dens < DENSITY_FLOOR):
            raise NodeError("density below floor in spherical wave")
        return self.packet().velocity(r, t)

    def width_scale(self, t) -> float:
        """Radial flow factor sqrt(alpha^2 + t^2/(4 m^2)) / alpha."""
        w = self.packet().width_param(t)
        return np.abs(w) / self.alpha


def collapse_to_detection(a: np.ndarray, params: DecayParams, t0: float) -> SphericalWave:
    """Effective wave guiding the partner after a detection at point a."""
    return SphericalWave(center_a=np.asarray(a, dtype=float).reshape(3),
                         alpha=params.alpha, t0=t0, mass=params.m2)


def conditional_packet(a: np.ndarray, params: DecayParams, t_star: float,
                       decay_center: np.ndarray | None = None) -> GaussianPacket:
    """Exact collapsed packet for particle 2 given particle 1 found at ``a``.

    Both factors of the regularized pair wave are sliced at r1 = a: the
    relative factor is a packet of width alpha + i t*/(2 mu) centered on a,
    the CM factor one of width (hbar/sigma + i t*/(2 M)) (M/m2)^2 centered
    on (M c0 - m1 a)/m2.  Their product is a single complex-center packet
    which subsequently spreads with mass m2.  As sigma -> 0 it reduces to
    the spherical wave centered on the detection point.
    """
    a = np.asarray(a, dtype=float).reshape(3)
    c0 = np.zeros(3) if decay_center is None else np.asarray(decay_center, float).reshape(3)
    m1, m2, M = params.m1, params.m2, params.total_mass
    w_rel = complex(params.alpha) + 0.5j * t_star / params.mu
    rel = GaussianPacket(center=a.astype(complex), width0=w_rel, mass=m2, t0=t_star)
    if params.sigma == 0.0:
        return rel
    w_cm = (complex(params.cm_width) + 0.5j * t_star / M) * (M / m2) ** 2
    cm = GaussianPacket(center=((M * c0 - m1 * a) / m2).astype(complex),
                        width0=w_cm, mass=m2, t0=t_star)
    return multiply_packets(rel, cm, t_star, mass=m2)


# -- converging beams ----------------------------------------------------------


@dataclass(frozen=True)
class GaussianBeam:
    """Converging-then-diverging packet with its waist at the focus.

    The packet center follows the classical ray through ``focus`` with
    velocity arrival_momentum/mass, and the transverse width has its
    minimum waist_w0 at focus_time, mimicking the action of a lens on an
    incoming wave in the optics analogy.
    """

    focus: np.ndarray
    waist_w0: float
    arrival_momentum: np.ndarray
    focus_time: float
    mass: float

    def __post_init__(self):
        object.__setattr__(self, "focus", np.asarray(self.focus, dtype=float).reshape(3))
        object.__setattr__(self, "arrival_momentum",
                           np.asarray(self.arrival_momentum, dtype=float).reshape(3))
        if self.waist_w0 <= 0.0:
            raise DomainError("waist must be positive")
        if self.mass <= 0.0:
            raise DomainError("mass must be positive")

    def packet(self) -> GaussianPacket:
        # imaginary center offset boosts the packet to the ray velocity
        w_r = self.waist_w0**2 / HBAR
        velocity = self.arrival_momentum / self.mass
        center = self.focus + 2j * self.mass * w_r * velocity
        return GaussianPacket(center=center, width0=complex(w_r),
                              mass=self.mass, t0=self.focus_time)

    def width(self, t):
        """Transverse density std; equals waist_w0 at focus_time."""
        return self.packet().density_std(t)

    def center(self, t):
        return self.packet().density_center(t)

    def axis_direction(self) -> np.ndarray:
        return _unit(self.arrival_momentum)


def beam_trajectory(beam: GaussianBeam, initial_offset, t_span, dt: float | None = None,
                    stride: int = 1) -> Trajectory:
    """RK4 Bohmian path through the beam from a transverse offset at the start.

    The initial point sits in the plane through the packet center at
    t_span[0], offset along the transverse basis.  The exact flow scales
    the offset by width(t)/width(t_start); the integrated path must match
    it, and approaches the straight entry-to-focus line as the waist
    shrinks.
    """
    t_start, t_end = float(t_span[0]), float(t_span[1])
    if t_end <= t_start:
        raise DomainError("empty time span")
    offset = np.asarray(initial_offset, dtype=float).reshape(2)
    e1, e2 = transverse_basis(beam.axis_direction())
    packet = beam.packet()
    r = packet.density_center(t_start) + offset[0] * e1 + offset[1] * e2

    if dt is None:
        dt = (t_end - t_start) / 2000.0
    n_steps = int(np.ceil((t_end - t_start) / dt))
    times = [t_start]
    path = [r]
    t = t_start
    for k in range(n_steps):
        h = min(dt, t_end - t)
        r = _rk4_step(lambda tt, rr: packet.velocity(rr, tt), t, r, h)
        t = t_start + (k + 1) * dt if t + h < t_end else t_end
        if k % stride == stride - 1 or t >= t_end:
            times.append(t)
            path.append(r)
        if t >= t_end:
            break
    return Trajectory(times=np.asarray(times), r1=np.asarray(path))


# -- apertures -----------------------------------------------------------------


@dataclass(frozen=True)
class Slit:
    width: float

    def passes(self, y1, y2, center):
        return np.abs(y1 - center) <= 0.5 * self.width


@dataclass(frozen=True)
class Disk:
    radius: float

    def passes(self, y1, y2, center):
        return (y1 - center) ** 2 + y2**2 <= self.radius**2


@dataclass(frozen=True)
class DoubleSlit:
    width: float
    separation: float

    def passes(self, y1, y2, center):
        lo = np.abs(y1 - (center - 0.5 * self.separation)) <= 0.5 * self.width
        hi = np.abs(y1 - (center + 0.5 * self.separation)) <= 0.5 * self.width
        return lo | hi


@dataclass(frozen=True)
class ApertureMask:
    """Mask in the detection plane: shape, transverse center along the scan
    direction, and an axial offset of its plane from the nominal distance S."""

    shape: Slit | Disk | DoubleSlit
    center: float = 0.0
    plane_offset: float = 0.0

    def __post_init__(self):
        dims = [getattr(self.shape, f) for f in ("width", "radius", "separation")
                if hasattr(self.shape, f)]
        if any(d <= 0.0 for d in dims):
            raise DomainError("mask dimensions must be positive")

    def passes(self, y1, y2):
        return self.shape.passes(np.asarray(y1), np.asarray(y2), self.center)


# -- vectorised crossing finder ------------------------------------------------


def _first_crossing(f, t_lo: float, t_hi: float, n_grid: int = 257,
                    iters: int = 60) -> np.ndarray:
    """Per-sample first root of f(t) = 0 on [t_lo, t_hi]; NaN where none.

    f maps an array of times (one per sample) to an array of values.  A
    geometric scan locates the first sign change, then bisection refines
    it.  Roots between grid nodes with an even number of crossings are
    beyond this finder's contract (nowhere relevant for monotone-dominant
    flows).
    """
    grid = np.geomspace(t_lo, t_hi, n_grid)
    n = len(np.atleast_1d(f(np.full(1, t_lo))))  # probe sample count lazily
    prev = f(np.full(n, grid[0]))
    lo = np.full(n, np.nan)
    hi = np.full(n, np.nan)
    found = np.zeros(n, dtype=bool)
    t_prev = np.full(n, grid[0])
    for tg in grid[1:]:
        cur = f(np.full(n, tg))
        flip = ~found & (np.sign(cur) != np.sign(prev))
        lo[flip] = t_prev[flip]
        hi[flip] = tg
        found |= flip
        keep = ~found
        prev = np.where(keep, cur, prev)
        t_prev = np.where(keep, tg, t_prev)
        if found.all():
            break
    if not found.any():
        return np.full(n, np.nan)
    lo_b = np.where(found, lo, t_lo)
    hi_b = np.where(found, hi, t_hi)
    f_lo = f(lo_b)
    for _ in range(iters):
        mid = 0.5 * (lo_b + hi_b)
        f_mid = f(mid)
        same = np.sign(f_mid) == np.sign(f_lo)
        lo_b = np.where(same, mid, lo_b)
        f_lo = np.where(same, f_mid, f_lo)
        hi_b = np.where(same, hi_b, mid)
    out = 0.5 * (lo_b + hi_b)
    out[~found] = np.nan
    return out


# -- coincidence scan ----------------------------------------------------------


@dataclass(frozen=True)
class GhostImage:
    """Coincidence image histogram plus the raw arrival coordinates."""

    bin_centers: np.ndarray
    counts: np.ndarray
    arrivals: np.ndarray
    scan_range: tuple[float, float]
    n_sampled: int
    n_detected: int
    n_coincident: int
    n_imaged: int
    paths: list = field(default_factory=list)

    def image_mean(self) -> float:
        return float(np.mean(self.arrivals))

    def image_rms(self) -> float:
        return float(np.std(self.arrivals))

    @property
    def bin_width(self) -> float:
        return float(self.bin_centers[1] - self.bin_centers[0]) if len(self.bin_centers) > 1 else 0.0


def _pair_scales(params: DecayParams, t):
    """Flow scale factors (cm, rel) of the regularized pair wave at times t."""
    t = np.asarray(t, dtype=float)
    alpha, beta = params.alpha, params.cm_width
    g_rel = np.sqrt(alpha**2 + t**2 / (4.0 * params.mu**2)) / alpha
    g_cm = np.sqrt(beta**2 + t**2 / (4.0 * params.total_mass**2)) / beta
    return g_cm, g_rel


def ghost_image_scan(lens: LensSetup, mask: ApertureMask, spec: EnsembleSpec,
                     scan_bins: int, scan_range: tuple[float, float] | None = None,
                     decay_plane_frac: float = 0.5, collect_paths: int = 0,
                     path_samples: int = 48) -> GhostImage:
    """Monte Carlo coincidence image of the mask through the lens.

    Pipeline per sampled decay: propagate the pair until particle 1 first
    reaches the detection plane; keep the event if it passes the mask;
    collapse the pair wave at the detection point; carry particle 2 on the
    collapsed packet to the lens plane; apply the thin-lens kick to the
    transverse packet; continue to the scan plane at S' and record the
    transverse arrival coordinate along the scan direction.

    Raises EmptyImageError when no event survives all stages.
    """
    if scan_bins < 1:
        raise DomainError("need at least one scan bin")
    p = spec.params
    m1, m2, M = p.m1, p.m2, p.total_mass
    axis = lens.axis
    e1, e2 = transverse_basis(axis)
    s_plane = lens.S + mask.plane_offset
    z0 = decay_plane_frac * lens.S

    sample = sample_equilibrium(spec)
    # coordinates relative to the decay center z0*axis
    cm0 = (m1 * sample.r1 + m2 * sample.r2) / M
    s0 = sample.separation
    n = spec.n

    def z1_of_t(t):
        g_cm, g_rel = _pair_scales(p, t)
        return (z0 + (cm0 @ axis) * g_cm + (m2 / M) * (s0 @ axis) * g_rel) - s_plane

    u_char = np.sqrt(HBAR / (4.0 * p.alpha)) / p.mu
    t_ref = max(2.0 * p.mu * p.alpha, s_plane / max(u_char, 1e-30))
    t_star = _first_crossing(z1_of_t, 1e-9 * t_ref, 1e9 * t_ref)
    detected = np.isfinite(t_star)
    n_detected = int(np.count_nonzero(detected))
    if n_detected == 0:
        raise EmptyImageError("no particle-1 arrivals at the detection plane")

    idx = np.nonzero(detected)[0]
    ts = t_star[idx]
    g_cm, g_rel = _pair_scales(p, ts)
    cm_t = z0 * axis + cm0[idx] * g_cm[:, None]
    s_t = s0[idx] * g_rel[:, None]
    a = cm_t + (m2 / M) * s_t          # particle 1 detection points
    x2 = cm_t - (m1 / M) * s_t         # particle 2 positions at detection

    y1 = (a - s_plane * axis) @ e1
    y2 = (a - s_plane * axis) @ e2
    passed = mask.passes(y1, y2)
    n_coincident = int(np.count_nonzero(passed))
    if n_coincident == 0:
        raise EmptyImageError("no coincidences pass the mask")
    idx = idx[passed]
    ts, a, x2 = ts[passed], a[passed], x2[passed]

    # collapsed packet for particle 2 (vectorised component arithmetic):
    # both pair-wave factors sliced at r1 = a, multiplied into one complex
    # Gaussian that subsequently spreads with mass m2
    w_rel = p.alpha + 0.5j * ts / p.mu
    if p.sigma > 0.0:
        w_cm = (p.cm_width + 0.5j * ts / M) * (M / m2) ** 2
        c_cm = (M * (z0 * axis) - m1 * a) / m2
        w_star = 1.0 / (1.0 / w_rel + 1.0 / w_cm)
        c_star = w_star[:, None] * (a / w_rel[:, None] + c_cm / w_cm[:, None])
    else:
        w_star = w_rel
        c_star = a.astype(complex)
    w_r = w_star.real                    # constant under free evolution
    w_i_star = w_star.imag

    def lon_state(w_i, c_cplx, w_real):
        """Density center and std of a packet at Im(W) = w_i."""
        x_c = c_cplx.real + (w_i / w_real)[:, None] * c_cplx.imag
        width = np.sqrt(HBAR * (w_real**2 + w_i**2) / w_real)
        return x_c, width

    x_c0, width0 = lon_state(w_i_star, c_star, w_r)
    delta = x2 - x_c0

    # Particle 2 crosses the lens plane either before its partner's
    # detection (under the pair flow) or after it (under the collapsed
    # flow).  The detection projector acts on particle 1 and the lens
    # unitary on particle 2, so they commute: the kick always transforms
    # the detection-centered collapsed packet, evaluated at the crossing
    # event.  The image point this produces is set by the packet's
    # wavefront curvature at the lens, which depends only on geometry, not
    # on the kick time.
    cm0_z = cm0[idx] @ axis
    s0_z = s0[idx] @ axis

    def z2_pair(t):
        g_cm_t, g_rel_t = _pair_scales(p, t)
        return z0 + cm0_z * g_cm_t - (m1 / M) * s0_z * g_rel_t

    def z2_collapsed(t):
        w_i = w_i_star + 0.5 * (t - ts) / m2
        x_c, width = lon_state(w_i, c_star, w_r)
        return (x_c @ axis) + (delta @ axis) * width / width0

    t_ref2 = max(2.0 * p.mu * p.alpha, s_plane / max(u_char, 1e-30))
    t_pair = _first_crossing(z2_pair, 1e-9 * t_ref2, 1e9 * t_ref2)
    early = np.isfinite(t_pair) & (t_pair < ts)
    tau_c = _first_crossing(lambda t: z2_collapsed(ts + t),
                            1e-9 * t_ref2, 1e9 * t_ref2)
    late = ~early & np.isfinite(tau_c)
    kicked = early | late
    if not kicked.any():
        raise EmptyImageError("no particle-2 paths reach the lens plane")
    t_kick = np.where(early, t_pair, ts + np.where(np.isfinite(tau_c), tau_c, 0.0))

    idx, ts, a, x2 = idx[kicked], ts[kicked], a[kicked], x2[kicked]
    w_star, c_star, w_r = w_star[kicked], c_star[kicked], w_r[kicked]
    w_i_star, x_c0, width0, delta = (w_i_star[kicked], x_c0[kicked],
                                     width0[kicked], delta[kicked])
    t_kick, early = t_kick[kicked], early[kicked]
    cm0_z, s0_z = cm0_z[kicked], s0_z[kicked]

    # particle position at the kick event
    g_cm_k, g_rel_k = _pair_scales(p, t_kick)
    x2_pair_k = z0 * axis + cm0[idx] * g_cm_k[:, None] - (m1 / M) * s0[idx] * g_rel_k[:, None]
    w_i_kick = w_i_star + 0.5 * (t_kick - ts) / m2
    x_c_kick, width_kick = lon_state(w_i_kick, c_star, w_r)
    x2_coll_k = x_c_kick + delta * (width_kick / width0)[:, None]
    x2_kick = np.where(early[:, None], x2_pair_k, x2_coll_k)
    w_kick = w_r + 1j * w_i_kick

    # local longitudinal momentum of the wave at the lens center
    v_wave = np.imag(c_star @ axis / w_kick) / (2.0 * m2)
    p_kick = m2 * np.abs(v_wave)

    # thin-lens kick on the transverse packet components
    w_out = 1.0 / (1.0 / w_kick + 2.0j * p_kick / lens.f)
    c1_out = (c_star @ e1) * w_out / w_kick
    c2_out = (c_star @ e2) * w_out / w_kick

    # the longitudinal packet is untouched by the lens: continue its flow
    # from the crossing event to the scan plane
    c_rz, c_iz = c_star.real @ axis, c_star.imag @ axis
    z_kick = x2_kick @ axis
    dz_kick = z_kick - (c_rz + (w_i_kick / w_r) * c_iz)

    def z_after_lens(t):
        w_i = w_i_kick + 0.5 * (t - t_kick) / m2
        z_c = c_rz + (w_i / w_r) * c_iz
        width = np.sqrt(HBAR * (w_r**2 + w_i**2) / w_r)
        return z_c + dz_kick * width / width_kick + lens.S_prime

    t_ref3 = max(2.0 * m2 * p.alpha, lens.S_prime / max(u_char, 1e-30))
    tau3 = _first_crossing(lambda t: z_after_lens(t_kick + t),
                           1e-9 * t_ref3, 1e9 * t_ref3)
    scanned = np.isfinite(tau3)
    if not scanned.any():
        raise EmptyImageError("no particles cross the lens toward the scan plane")
    idx, ts, a = idx[scanned], ts[scanned], a[scanned]
    t_kick, x2_kick = t_kick[scanned], x2_kick[scanned]
    w_kick, w_out = w_kick[scanned], w_out[scanned]
    c1_out, c2_out = c1_out[scanned], c2_out[scanned]
    c_star, w_r, w_i_kick = c_star[scanned], w_r[scanned], w_i_kick[scanned]
    early = early[scanned]
    t_scan = t_kick + tau3[scanned]

    # transverse arrival: affine flow of the kicked packet from lens to scan
    w_out_r, w_out_i = w_out.real, w_out.imag

    def trans_center(w_i, c_complex):
        return c_complex.real + (w_i / w_out_r) * c_complex.imag

    width_out_kick = np.sqrt(HBAR * (w_out_r**2 + w_out_i**2) / w_out_r)
    d1 = x2_kick @ e1 - trans_center(w_out_i, c1_out)
    d2 = x2_kick @ e2 - trans_center(w_out_i, c2_out)
    w_i_scan = w_out_i + 0.5 * (t_scan - t_kick) / m2
    grow = np.sqrt(HBAR * (w_out_r**2 + w_i_scan**2) / w_out_r) / width_out_kick
    arrive1 = trans_center(w_i_scan, c1_out) + d1 * grow
    n_imaged = len(arrive1)

    if scan_range is None:
        span = 1.05 * float(np.max(np.abs(arrive1))) if n_imaged else 1.0
        scan_range = (-span, span) if span > 0 else (-1.0, 1.0)
    edges = np.linspace(scan_range[0], scan_range[1], scan_bins + 1)
    counts, _ = np.histogram(arrive1, bins=edges)
    centers = 0.5 * (edges[:-1] + edges[1:])

    paths = []
    for j in range(min(collect_paths, n_imaged)):
        w_star_j = w_r[j] + 1j * (w_i_kick[j] - 0.5 * (t_kick[j] - ts[j]) / m2)
        paths.append(_assemble_path(
            p, z0 * axis, cm0[idx[j]], s0[idx[j]], float(ts[j]), a[j],
            complex(w_star_j), c_star[j], float(t_kick[j]), complex(w_out[j]),
            (complex(c1_out[j]), complex(c2_out[j])),
            float(t_scan[j]), e1, e2, axis, n_samples=path_samples))

    return GhostImage(bin_centers=centers, counts=counts, arrivals=arrive1,
                      scan_range=(float(scan_range[0]), float(scan_range[1])),
                      n_sampled=n, n_detected=n_detected,
                      n_coincident=n_coincident, n_imaged=n_imaged, paths=paths)


def _assemble_path(params, c0_vec, cm0, s0, t_star, a, w_star, c_star, t_kick,
                   w_out, c_out_t, t_scan, e1, e2, axis, n_samples):
    """Sampled two-particle polyline for one coincidence (for plots/CSV).

    Particle 1 follows the pair flow until its detection and is parked at
    the detection point afterwards.  Particle 2 follows the pair flow until
    the lens kick or the detection, whichever comes first, the collapsed
    packet in between, and the kicked transverse packet (with the unkicked
    longitudinal factor) after crossing the lens.
    """
    m1, m2, M = params.m1, params.m2, params.total_mass
    w_r = w_star.real
    m2_ = m2
    grid = np.linspace(1e-9 * t_scan, t_scan, n_samples)
    times = np.unique(np.concatenate([grid, np.asarray([t_star, t_kick])]))
    times = times[(times > 0.0) & (times <= t_scan)]

    g_cm, g_rel = _pair_scales(params, times)
    cm_t = c0_vec + cm0[None, :] * g_cm[:, None]
    s_t = s0[None, :] * g_rel[:, None]
    r1 = np.where((times <= t_star)[:, None], cm_t + (m2 / M) * s_t, a[None, :])
    r2_pair = cm_t - (m1 / M) * s_t

    def lon_center(w_i):
        return c_star.real[None, :] + np.multiply.outer(np.atleast_1d(w_i) / w_r,
                                                        c_star.imag)

    def lon_width(w_i):
        return np.sqrt(HBAR * (w_r**2 + w_i**2) / w_r)

    def w_i_at(t):
        return w_star.imag + 0.5 * (np.asarray(t) - t_star) / m2_

    # collapsed flow anchored at the detection event
    i_det = int(np.searchsorted(times, t_star))
    x2_det = r2_pair[min(i_det, len(times) - 1)]
    delta = x2_det - lon_center(w_i_at(t_star))[0]
    w_i = w_i_at(times)
    collapsed = lon_center(w_i) + np.outer(lon_width(w_i) / lon_width(w_i_at(t_star)),
                                           delta)

    pre_kick = np.where((times <= min(t_star, t_kick))[:, None], r2_pair, collapsed)

    # post-kick: unkicked longitudinal flow + kicked transverse packets,
    # both anchored at the crossing event
    if t_kick < t_star:
        g_cm_k, g_rel_k = _pair_scales(params, t_kick)
        x2_kick = c0_vec + cm0 * g_cm_k - (m1 / M) * s0 * g_rel_k
    else:
        w_i_k = w_i_at(t_kick)
        x2_kick = (lon_center(w_i_k)[0]
                   + delta * lon_width(w_i_k) / lon_width(w_i_at(t_star)))
    w_i_k = w_i_at(t_kick)
    zc = lambda w: float(c_star.real @ axis) + (w / w_r) * float(c_star.imag @ axis)
    dz = float(x2_kick @ axis) - zc(w_i_k)
    z_post = zc(w_i) + dz * lon_width(w_i) / lon_width(w_i_k)

    wo_r, wo_i0 = w_out.real, w_out.imag
    wo_i = wo_i0 + 0.5 * (times - t_kick) / m2_
    trans_w = lambda w: np.sqrt(HBAR * (wo_r**2 + w**2) / wo_r)
    post = np.outer(z_post, axis)
    for comp, e in zip(c_out_t, (e1, e2)):
        c_t0 = comp.real + (wo_i0 / wo_r) * comp.imag
        d0 = float(x2_kick @ e - c_t0)
        c_t = comp.real + (wo_i / wo_r) * comp.imag
        post = post + np.outer(c_t + d0 * trans_w(wo_i) / trans_w(wo_i0), e)

    r2 = np.where((times <= t_kick)[:, None], pre_kick, post)
    return Trajectory(times=times, r1=r1, r2=r2, params=params)
