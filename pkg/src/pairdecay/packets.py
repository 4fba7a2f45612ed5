"""Freely evolving Gaussian packets with complex width and complex center.

Every analytic wave in this package is built from factors of the form

    psi(r, t) = (pi*hbar / W(t))**(d/2) * exp(-(r - c)**2 / (4*hbar*W(t)))

with W(t) = W0 + i*(t - t0)/(2*m) a complex width parameter and c a
(possibly complex) constant center vector.  A real center gives a packet
spreading in place; an imaginary part of the center boosts the packet to a
uniform group velocity.  The guidance velocity field of such a packet is
linear in position, so Bohmian trajectories are affine maps of their
initial conditions: this is what makes ensemble propagation exact without
per-sample ODE integration.

Conventions: hbar = 1 in natural units throughout, kept symbolic in the
formulas for clarity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HBAR = 1.0


@dataclass(frozen=True)
class GaussianPacket:
    """Isotropic free Gaussian packet ``exp(-(r-c)^2 / 4*hbar*W)``.

    center : complex array, shape (d,)
        Constant complex center; Im(center) encodes a momentum boost.
    width0 : complex
        Width parameter W at time ``t0``.  Re(width0) > 0.
    mass : float
        Mass governing the spreading rate, W(t) = width0 + i (t-t0)/(2 mass).
    t0 : float
        Reference time of ``width0``.
    """

    center: np.ndarray
    width0: complex
    mass: float
    t0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=complex))
        if self.width0.real <= 0.0:
            raise ValueError("packet width parameter must have positive real part")
        if self.mass <= 0.0:
            raise ValueError("packet mass must be positive")

    # -- width bookkeeping -------------------------------------------------

    def width_param(self, t):
        """Complex width W(t); accepts scalars or arrays of times."""
        return self.width0 + 0.5j * (np.asarray(t) - self.t0) / self.mass

    def density_std(self, t):
        """Per-component standard deviation of |psi|^2 at time t."""
        w = self.width_param(t)
        return np.sqrt(HBAR * np.abs(w) ** 2 / w.real)

    def density_center(self, t):
        """Center of |psi|^2 at time t (real vector; drifts if Im(c) != 0).

        For array-valued t the leading axes of the result index time.
        """
        w = self.width_param(t)
        ratio = np.asarray(w.imag / w.real)
        return self.center.real + ratio[..., None] * self.center.imag

    def group_velocity(self):
        """Uniform drift velocity of the density center."""
        return self.center.imag / (2.0 * self.mass * self.width0.real)

    # -- pointwise evaluation ----------------------------------------------

    def log_amplitude(self, r, t):
        """log psi up to the constant normalisation; r shape (..., d).

        Scalar t applies to every position; an array t must broadcast
        against the leading axes of r.
        """
        w = self.width_param(t)
        d = self.center.shape[0]
        dr = np.asarray(r, dtype=complex) - self.center
        quad = np.sum(dr * dr, axis=-1)
        return 0.5 * d * np.log(np.pi * HBAR / w) - quad / (4.0 * HBAR * w)

    def amplitude(self, r, t):
        return np.exp(self.log_amplitude(r, t))

    def velocity(self, r, t):
        """Guidance velocity (hbar/m) grad(phase) at positions r, time t."""
        w = self.width_param(t)
        if np.ndim(w) > 0:
            w = w[..., None]
        dr = np.asarray(r, dtype=complex) - self.center
        return -np.imag(dr / w) / (2.0 * self.mass)

    # -- exact Bohmian flow -------------------------------------------------

    def flow(self, r0, t_from, t_to):
        """Map particle positions from t_from to t_to along the exact flow.

        The velocity field is linear in (r - center(t)), hence the flow is
        the affine map  r -> center(t2) + (w2/w1) * (r - center(t1)).
        """
        scale = self.density_std(t_to) / self.density_std(t_from)
        c1 = self.density_center(t_from)
        c2 = self.density_center(t_to)
        return c2 + scale * (np.asarray(r0, dtype=float) - c1)

    def flow_scale(self, t_from, t_to):
        return self.density_std(t_to) / self.density_std(t_from)


def multiply_packets(a: GaussianPacket, b: GaussianPacket, t: float, mass: float) -> GaussianPacket:
    """Pointwise product of two packets, refactored as a single packet at time t.

    Both factors are evaluated at time t; the product Gaussian then evolves
    freely with the given mass.  Used for wavefunction collapse, where the
    conditional wave is a product of a relative and a center-of-mass factor.
    """
    wa, wb = a.width_param(t), b.width_param(t)
    w = 1.0 / (1.0 / wa + 1.0 / wb)
    c = w * (a.center / wa + b.center / wb)
    return GaussianPacket(center=c, width0=w, mass=mass, t0=t)


def lens_kick(packet: GaussianPacket, t: float, focal_length: float,
              momentum: float, mass: float) -> GaussianPacket:
    """Apply a thin-lens quadratic phase to a transverse packet at time t.

    The lens multiplies the wave by exp(-i p r^2 / (2 hbar f)) about the
    lens center (the coordinate origin of the transverse plane), which maps
    the complex width and center as

        1/W' = 1/W + 2 i p / f,      c' = c W'/W.

    ``momentum`` is the longitudinal momentum magnitude of the packet.
    """
    w = packet.width_param(t)
    w_new = 1.0 / (1.0 / w + 2.0j * momentum / focal_length)
    c_new = packet.center * (w_new / w)
    return GaussianPacket(center=c_new, width0=w_new, mass=mass, t0=t)
