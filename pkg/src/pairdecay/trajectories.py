"""Guidance-equation trajectories: RK4 integration and the closed-form family.

The two routes validate each other: the fixed-step classical RK4
integrator works for any pair wave, while the closed form below holds for
the limit wave, where the center of mass is frozen and the separation
grows by the universal scale factor sqrt(t^2/(4 mu^2) + alpha^2)/alpha.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ResourceError, UnsupportedVariantError
from .wavecore import DecayParams, PairState, PairWave, pair_velocity

MAX_STEPS = int(1e8)


@dataclass(frozen=True)
class Trajectory:
    """Densely sampled path; r2 is None for single-particle paths."""

    times: np.ndarray
    r1: np.ndarray
    r2: np.ndarray | None = None
    params: DecayParams | None = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        r1 = np.asarray(self.r1, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "r1", r1)
        if self.r2 is not None:
            object.__setattr__(self, "r2", np.asarray(self.r2, dtype=float))
        if times.ndim != 1 or len(times) != len(r1):
            raise DomainError("times and positions must have matching lengths")
        if len(times) > 1 and not np.all(np.diff(times) > 0.0):
            raise DomainError("times must be strictly increasing")
        if not np.all(np.isfinite(r1)):
            raise DomainError("trajectory positions must be finite")
        if self.r2 is not None and not np.all(np.isfinite(self.r2)):
            raise DomainError("trajectory positions must be finite")

    def __len__(self):
        return len(self.times)

    def state(self, i: int) -> PairState:
        if self.r2 is None:
            raise DomainError("single-particle trajectory has no pair states")
        return PairState(self.r1[i], self.r2[i], float(self.times[i]))


@dataclass(frozen=True)
class ClosedFormSpec:
    """Constants of the straight-line family: CM point c1 and direction d.

    d is the separation direction scaled so that r1 - r2 = d * sqrt(t^2 /
    (4 mu^2) + alpha^2); d = 0 gives a coincident static pair.
    """

    c1: np.ndarray = field(default_factory=lambda: np.zeros(3))
    d: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "c1", np.asarray(self.c1, dtype=float).reshape(3))
        object.__setattr__(self, "d", np.asarray(self.d, dtype=float).reshape(3))


def separation_scale(params: DecayParams, t) -> np.ndarray:
    """Scale factor sqrt(t^2/(4 mu^2) + alpha^2); even in t."""
    t = np.asarray(t, dtype=float)
    return np.sqrt(t**2 / (4.0 * params.mu**2) + params.alpha**2)


def closed_form_pair(spec: ClosedFormSpec, params: DecayParams, t: float) -> PairState:
    """Closed-form pair state at time t for the limit wave.

    r1 = c1 + (m2/M) d S(t),  r2 = c1 - (m1/M) d S(t) with S the separation
    scale.  The mass weights follow from the guidance velocities (the CM is
    exactly conserved); for equal masses this reduces to the symmetric form
    with constants C1 = c1 and C2 = d/2.
    """
    if params.sigma != 0.0:
        raise UnsupportedVariantError(
            "closed form is derived for the limit wave (sigma == 0)")
    M = params.total_mass
    s = spec.d * separation_scale(params, t)
    return PairState(spec.c1 + params.m2 / M * s, spec.c1 - params.m1 / M * s, t)


def closed_form_from_state(initial: PairState, params: DecayParams) -> ClosedFormSpec:
    """Constants of the closed-form family passing through the given state."""
    M = params.total_mass
    c1 = (params.m1 * initial.r1 + params.m2 * initial.r2) / M
    d = initial.separation / separation_scale(params, initial.t)
    return ClosedFormSpec(c1=c1, d=d)


def _rk4_step(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_pair(wave: PairWave, initial: PairState, t_end: float, dt: float,
                   stride: int = 1) -> Trajectory:
    """Integrate both guidance equations with fixed-step classical RK4.

    Samples every ``stride``-th step plus both endpoints.  Node errors from
    the velocity evaluation propagate; more than 1e8 steps is rejected as a
    resource error.  The velocity field of the Gaussian waves is smooth, so
    adaptive stepping is unnecessary; convergence is verified against the
    closed form in the tests.
    """
    if dt <= 0.0:
        raise DomainError("dt must be positive")
    if t_end <= initial.t:
        raise DomainError("t_end must exceed the initial time")
    n_steps = int(np.ceil((t_end - initial.t) / dt))
    if n_steps > MAX_STEPS:
        raise ResourceError(f"{n_steps} steps exceed the {MAX_STEPS:.0e} budget")

    def f(t, y):
        v1, v2 = pair_velocity(wave, PairState(y[:3], y[3:], t))
        return np.concatenate([v1, v2])

    t = initial.t
    y = np.concatenate([initial.r1, initial.r2])
    times = [t]
    path = [y]
    for k in range(n_steps):
        h = min(dt, t_end - t)
        y = _rk4_step(f, t, y, h)
        t = initial.t + (k + 1) * dt if t + h < t_end else t_end
        if k % stride == stride - 1 or t >= t_end:
            times.append(t)
            path.append(y)
        if t >= t_end:
            break
    path = np.asarray(path)
    return Trajectory(times=np.asarray(times), r1=path[:, :3], r2=path[:, 3:],
                      params=wave.params)


def integrate_pair_batch(wave: PairWave, r1_0: np.ndarray, r2_0: np.ndarray,
                         t0: float, t_end: float, n_steps: int) -> tuple[np.ndarray, np.ndarray]:
    """RK4 of many pairs on a shared time grid; returns final (r1, r2).

    Vectorised companion to integrate_pair for ensembles and convergence
    sweeps; all pairs share t0 and t_end.
    """
    if n_steps < 1:
        raise DomainError("n_steps must be at least 1")
    if n_steps > MAX_STEPS:
        raise ResourceError(f"{n_steps} steps exceed the {MAX_STEPS:.0e} budget")
    h = (t_end - t0) / n_steps
    y = np.concatenate([np.asarray(r1_0, float), np.asarray(r2_0, float)], axis=-1)

    def f(t, y):
        v1, v2 = wave.velocity_arrays(y[..., :3], y[..., 3:], t)
        return np.concatenate([v1, v2], axis=-1)

    t = t0
    for _ in range(n_steps):
        y = _rk4_step(f, t, y, h)
        t += h
    return y[..., :3], y[..., 3:]


def straightness_measure(traj: Trajectory) -> float:
    """Maximum perpendicular deviation from the first-to-last chord, per path length.

    Zero means a perfectly straight (or degenerate, zero-length) path; the
    maximum over both particles is returned for pair trajectories.
    """
    if len(traj) < 3:
        raise DomainError("straightness needs at least three samples")

    def one(path):
        arc = float(np.sum(np.linalg.norm(np.diff(path, axis=0), axis=1)))
        if arc == 0.0:
            return 0.0
        chord = path[-1] - path[0]
        norm = np.linalg.norm(chord)
        if norm == 0.0:
            # closed loop: all deviation is perpendicular by convention
            return float(np.max(np.linalg.norm(path - path[0], axis=1)) / arc)
        u = chord / norm
        rel = path - path[0]
        perp = rel - np.outer(rel @ u, u)
        return float(np.max(np.linalg.norm(perp, axis=1)) / arc)

    result = one(traj.r1)
    if traj.r2 is not None:
        result = max(result, one(traj.r2))
    return result


# -- CSV export -------------------------------------------------------------

TRAJECTORY_COLUMNS = ["t", "r1x", "r1y", "r1z", "r2x", "r2y", "r2z"]


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Write t, r1x..r2z rows with 17 significant digits (lossless doubles)."""
    if traj.r2 is None:
        raise DomainError("CSV export expects a pair trajectory")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAJECTORY_COLUMNS)
        for i in range(len(traj)):
            row = [traj.times[i], *traj.r1[i], *traj.r2[i]]
            writer.writerow([f"{v:.17g}" for v in row])


def read_trajectory_csv(path) -> Trajectory:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != TRAJECTORY_COLUMNS:
            raise DomainError(f"unexpected trajectory header {header}")
        data = np.array([[float(v) for v in row] for row in reader])
    return Trajectory(times=data[:, 0], r1=data[:, 1:4], r2=data[:, 4:7])
