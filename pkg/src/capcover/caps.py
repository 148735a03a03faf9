"""Geodesic caps on the unit sphere and the quantities attached to them.

A cap is stored with its normalized surface mass (total sphere mass 1), its
geodesic radius, and the Euclidean cosine threshold cos(radius); the
threshold is the hot-path value for membership tests, so it is kept
redundantly and checked for consistency at construction.

The Gaussian half-space offset h (with upper tail Q(h) equal to the cap
mass) and its Lambert-W upper bound eta are linked to a cap only through
equal measures, never through an assumed closed-form correspondence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .special import (
    gauss_tail,
    inv_gauss_tail,
    inv_reg_inc_beta,
    lambert_w0,
    log_gamma,
    reg_inc_beta,
)

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def check_dim(d: int, minimum: int = 2) -> int:
    """Validate an ambient dimension."""
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool):
        raise DomainError(f"dimension must be an integer, got {d!r}")
    if d < minimum:
        raise DomainError(f"dimension must be >= {minimum}, got {d}")
    return int(d)


def ball_volume_log(d: int) -> float:
    """ln of the volume of the unit ball in dimension d."""
    d = check_dim(d, minimum=1)
    return 0.5 * d * math.log(math.pi) - log_gamma(0.5 * d + 1.0)


def sphere_surface_log(d: int) -> float:
    """ln of the surface measure of the unit sphere bounding the d-ball.

    Cone-volume formula: surface = d * ball volume.
    """
    d = check_dim(d, minimum=1)
    return math.log(d) + ball_volume_log(d)


def cap_mass_from_radius(d: int, theta: float) -> float:
    """Normalized surface mass of a cap of geodesic radius theta in (0, pi].

    For theta <= pi/2 this is (1/2) I_{sin^2 theta}((d-1)/2, 1/2); larger
    radii go through the complementary cap. Strictly increasing in theta.
    On the circle (d=2) the mass is exactly theta/pi.
    """
    d = check_dim(d)
    if not (0.0 < theta <= math.pi):
        raise DomainError(f"geodesic radius must lie in (0, pi], got {theta}")
    if d == 2:
        return theta / math.pi
    if theta == math.pi:
        return 1.0
    if theta > 0.5 * math.pi:
        return 1.0 - cap_mass_from_radius(d, math.pi - theta)
    s2 = math.sin(theta) ** 2
    return 0.5 * reg_inc_beta(s2, 0.5 * (d - 1), 0.5)


def radius_from_mass(d: int, m: float) -> float:
    """Geodesic radius of the cap with normalized mass m in (0, 1]."""
    d = check_dim(d)
    if not (0.0 < m <= 1.0):
        raise DomainError(f"cap mass must lie in (0, 1], got {m}")
    if d == 2:
        return math.pi * m
    if m == 1.0:
        return math.pi
    if m > 0.5:
        return math.pi - radius_from_mass(d, 1.0 - m)
    x = inv_reg_inc_beta(2.0 * m, 0.5 * (d - 1), 0.5)
    return math.asin(math.sqrt(x))


def gaussian_halfspace_offset(f: float) -> float:
    """Distance h > 0 of a hyperplane whose far half-space has Gaussian mass f."""
    if not (0.0 < f < 0.5):
        raise DomainError(f"half-space mass must lie in (0, 1/2), got {f}")
    return inv_gauss_tail(f)


def eta_bound(f: float) -> float:
    """Lambert-W upper bound sqrt(W((sqrt(2 pi) f)^-2)) on the offset for mass f.

    Dominates gaussian_halfspace_offset(f) for every f in (0, 1/2); strictly
    decreasing in f.
    """
    if f <= 0.0:
        raise DomainError(f"mass must be positive, got {f}")
    log_arg = -2.0 * (_LOG_SQRT_2PI + math.log(f))
    if log_arg > 700.0:
        # W argument overflows a float; solve w + ln w = log_arg directly
        w = log_arg - math.log(log_arg)
        for _ in range(60):
            correction = (w + math.log(w) - log_arg) / (1.0 + 1.0 / w)
            w -= correction
            if abs(correction) <= 1e-14 * w:
                break
        return math.sqrt(w)
    return math.sqrt(lambert_w0(math.exp(log_arg)))


def mass_upper_limit(d: int) -> float:
    """Largest per-cap mass admitted by the antipodal covering estimate.

    0.9^((d-1)/2) * vol(ball_{d-1}) / vol(sphere_{d-1}), in log space.
    """
    d = check_dim(d)
    ln = 0.5 * (d - 1) * math.log(0.9) + ball_volume_log(d - 1) - sphere_surface_log(d)
    return math.exp(ln)


@dataclass(frozen=True, eq=False)
class Cap:
    """A geodesic cap: unit center, normalized mass, radius, cosine threshold."""

    center: np.ndarray
    mass: float
    geodesic_radius: float
    cos_threshold: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        object.__setattr__(self, "center", c)
        if c.ndim != 1 or c.size < 2:
            raise DomainError(f"cap center must be a vector in dimension >= 2, got shape {c.shape}")
        norm = float(np.linalg.norm(c))
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(f"cap center must be a unit vector, |center| = {norm}")
        if not (0.0 < self.mass <= 1.0):
            raise DomainError(f"cap mass must lie in (0, 1], got {self.mass}")
        expected = cap_mass_from_radius(self.d, self.geodesic_radius)
        if abs(expected - self.mass) > 1e-10 * max(self.mass, 1e-300):
            raise DomainError(
                f"inconsistent cap: mass {self.mass} vs {expected} from radius {self.geodesic_radius}"
            )
        if abs(self.cos_threshold - math.cos(self.geodesic_radius)) > 1e-12:
            raise DomainError("inconsistent cap: cos_threshold does not match geodesic radius")

    @property
    def d(self) -> int:
        return self.center.size


def cap_from_mass(center: np.ndarray, mass: float) -> Cap:
    """Build a cap from its center and normalized mass."""
    center = np.asarray(center, dtype=float)
    radius = radius_from_mass(center.size, mass)
    return Cap(center=center, mass=mass, geodesic_radius=radius, cos_threshold=math.cos(radius))


def cap_from_radius(center: np.ndarray, theta: float) -> Cap:
    """Build a cap from its center and geodesic radius."""
    center = np.asarray(center, dtype=float)
    mass = cap_mass_from_radius(center.size, theta)
    return Cap(center=center, mass=mass, geodesic_radius=theta, cos_threshold=math.cos(theta))


@dataclass(frozen=True)
class ConeGeometry:
    """Gaussian data of the cone spanned by a cap of mass f.

    offset is the hyperplane distance h with Q(h) = f; eta is the Lambert-W
    bound on it. offset <= eta holds throughout the admissible mass range.
    """

    d: int
    f: float
    offset: float
    eta: float

    def __post_init__(self):
        check_dim(self.d)
        limit = mass_upper_limit(self.d)
        if not (0.0 < self.f < limit):
            raise DomainError(
                f"cone mass must lie in (0, {limit:.6g}) for d={self.d}, got {self.f}"
            )
        if abs(gauss_tail(self.offset) - self.f) > 1e-12 * self.f:
            raise DomainError("inconsistent cone geometry: Q(offset) != f")
        if self.offset > self.eta:
            raise DomainError("inconsistent cone geometry: offset exceeds its eta bound")


def cone_geometry(d: int, f: float) -> ConeGeometry:
    """Assemble the ConeGeometry for a cap mass f in (0, mass_upper_limit(d))."""
    d = check_dim(d)
    limit = mass_upper_limit(d)
    if not (0.0 < f < limit):
        raise DomainError(f"cone mass must lie in (0, {limit:.6g}) for d={d}, got {f}")
    return ConeGeometry(d=d, f=f, offset=gaussian_halfspace_offset(f), eta=eta_bound(f))
