"""Closed-form evaluators for the theory side of the coverage problem.

Every asymptotic remainder in the correction terms is replaced by its exact
closed form (powers and products); the published series expansions are kept
only as cross-checks in the tests, since their implicit constants are not
usable numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .caps import ball_volume_log, check_dim, sphere_surface_log
from .coverage import expected_random_coverage
from .errors import DomainError

SQRT5_16 = 16.0 * math.sqrt(5.0)
SQRT5_8 = 8.0 * math.sqrt(5.0)

#: Reference ceiling for the covered proportion from the classical Euclidean
#: covering estimate in very high dimensions; reported for context only.
EFR_REFERENCE = 0.92334


@dataclass(frozen=True)
class TheoremInputs:
    """One evaluation point (d, N, alpha); alpha is held fixed as N varies."""

    d: int
    n_caps: int
    alpha: float

    def __post_init__(self):
        check_dim(self.d)
        if self.n_caps < 1:
            raise DomainError(f"n_caps must be >= 1, got {self.n_caps}")
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.alpha / self.n_caps >= 1.0 and self.n_caps > 1:
            raise DomainError("per-cap mass alpha/N must stay below 1")


@dataclass(frozen=True)
class BoundReport:
    """All terms of the two-sided coverage estimate at one (d, N, alpha)."""

    d: int
    n_caps: int
    alpha: float
    base: float  # 1 - e^-alpha
    beta_n: float
    alpha_n: float
    cone_term: float
    zone_term: float
    threshold_n: float
    lower: float
    upper: float
    precondition_met: bool

    def to_record(self) -> dict:
        return {
            "d": self.d,
            "N": self.n_caps,
            "alpha": self.alpha,
            "base": self.base,
            "betaN": self.beta_n,
            "alphaN": self.alpha_n,
            "coneTerm": self.cone_term,
            "zoneTerm": self.zone_term,
            "thresholdN": self.threshold_n,
            "lower": self.lower,
            "upper": self.upper,
            "preconditionMet": self.precondition_met,
        }


def beta_lower(n_caps: int, alpha: float) -> float:
    """Excess of the random-covering expectation over 1 - e^-alpha.

    Exact form e^-alpha - (1 - alpha/N)^N; nonnegative and decreasing in N.
    """
    return math.exp(-alpha) - (1.0 - expected_random_coverage(n_caps, alpha))


def sidak_remainder(n_caps: int, alpha: float) -> float:
    """Exact-form slab-product remainder e^-alpha - (1 - 2 alpha/N)^(N/2).

    Replaces the series e^-alpha (alpha^2/N + O(alpha^3/N^2)). When
    2 alpha/N >= 1 the product lower bound is vacuous (clamped at zero) and
    the remainder is e^-alpha.
    """
    if n_caps < 1:
        raise DomainError(f"n_caps must be >= 1, got {n_caps}")
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    ratio = 2.0 * alpha / n_caps
    if ratio >= 1.0:
        return math.exp(-alpha)
    product = math.exp(0.5 * n_caps * math.log1p(-ratio))
    return max(0.0, math.exp(-alpha) - product)


def zone_term(d: int, n_caps: int, alpha: float) -> float:
    """Equatorial-strip cost sqrt(2d/pi) (alpha/N)^(1/(d-1))."""
    check_dim(d)
    return math.sqrt(2.0 * d / math.pi) * (alpha / n_caps) ** (1.0 / (d - 1))


def alpha_correction(d: int, n_caps: int, alpha: float) -> float:
    """Upper-bound correction: zone term plus the exact slab-product remainder."""
    d = check_dim(d, minimum=3)
    return zone_term(d, n_caps, alpha) + sidak_remainder(n_caps, alpha)


def cone_term(d: int, alpha: float) -> float:
    """Truncated-cone cost (16 sqrt(5) / d) alpha^((d-3)/(d-1)) for d >= 4."""
    d = check_dim(d, minimum=4)
    return (SQRT5_16 / d) * alpha ** ((d - 3.0) / (d - 1.0))


def log_threshold_caps(d: int) -> float:
    """ln of the minimal cap count for the simplified zone bound; d >= 4."""
    d = check_dim(d, minimum=4)
    if d == 4:
        return 0.0  # formula base is exactly zero; vacuous threshold by convention
    return 0.5 * (d - 1) * math.log(15.0 * (d - 2) * (d - 4) / (2.0 * (d - 3)))


def threshold_caps(d: int) -> float:
    """(15(d-2)(d-4) / (2(d-3)))^((d-1)/2); returns 1 at d=4, inf past overflow."""
    d = check_dim(d, minimum=4)
    if d == 4:
        return 1.0
    try:
        return (15.0 * (d - 2) * (d - 4) / (2.0 * (d - 3))) ** (0.5 * (d - 1))
    except OverflowError:
        return math.inf


def zone_coefficient_log(d: int) -> float:
    """ln of 2 vol(sphere_{d-2}) / vol(sphere_{d-1}), the zone prefactor."""
    return math.log(2.0) + sphere_surface_log(d - 1) - sphere_surface_log(d)


@dataclass(frozen=True)
class ZoneBound:
    full: float
    simplified: float


def zone_bound(d: int, n_caps: int) -> ZoneBound:
    """Closed-form upper bounds on the zone mass for d >= 5, N >= 2.

    full uses the exact volume prefactor and three strip-width powers;
    simplified is sqrt(2d/pi) N^(-1/(d-1)) and dominates full once
    N >= threshold_caps(d).
    """
    d = check_dim(d, minimum=5)
    if n_caps < 2:
        raise DomainError(f"n_caps must be >= 2, got {n_caps}")
    s = n_caps ** (-1.0 / (d - 1))
    coeff = math.exp(zone_coefficient_log(d))
    bracket = s - (d - 3) / 6.0 * s**3 + 1.25 * (d - 2) * (d - 4) * s**5
    return ZoneBound(full=coeff * bracket, simplified=math.sqrt(2.0 * d / math.pi) * s)


def sidak_product_bound(masses) -> float:
    """Product of (1 - 2 f_i) over pair masses, evaluated in log space."""
    total = 0.0
    for f in masses:
        if not (0.0 < f < 0.5):
            raise DomainError(f"pair mass must lie in (0, 1/2), got {f}")
        total += math.log1p(-2.0 * f)
    return math.exp(total)


def theorem_bounds(inputs: TheoremInputs) -> BoundReport:
    """Assemble the full two-sided coverage report at one (d, N, alpha)."""
    d, n, alpha = inputs.d, inputs.n_caps, inputs.alpha
    check_dim(d, minimum=5)
    base = -math.expm1(-alpha)
    beta = beta_lower(n, alpha)
    cone = cone_term(d, alpha)
    zone = zone_term(d, n, alpha)
    alpha_n = zone + sidak_remainder(n, alpha)
    met = math.log(n) >= log_threshold_caps(d)
    return BoundReport(
        d=d,
        n_caps=n,
        alpha=alpha,
        base=base,
        beta_n=beta,
        alpha_n=alpha_n,
        cone_term=cone,
        zone_term=zone,
        threshold_n=threshold_caps(d),
        lower=base + beta,
        upper=base + cone + alpha_n,
        precondition_met=met,
    )


@dataclass(frozen=True)
class EulerBracket:
    """Large-N coverage bracket at alpha=1 and the interval it induces around e."""

    d: int
    coverage_lower: float  # 1 - e^-1
    coverage_upper: float  # 1 - e^-1 + 16 sqrt(5)/d
    e_lower: float  # 1/(1 - coverage_lower), exactly e
    e_upper: float  # 1/(1 - coverage_upper)

    @property
    def e_width(self) -> float:
        return self.e_upper - self.e_lower

    def to_record(self) -> dict:
        return {
            "d": self.d,
            "coverageLower": self.coverage_lower,
            "coverageUpper": self.coverage_upper,
            "eLower": self.e_lower,
            "eUpper": self.e_upper,
            "eWidth": self.e_width,
        }


def euler_report(d_grid) -> list[EulerBracket]:
    """Brackets pinning e from the alpha=1 large-N coverage limits, per dimension.

    Below d ~ 98 the coverage formula exceeds 1, so the induced interval
    around e is vacuous on the upper side (e_upper = inf).
    """
    out = []
    for d in d_grid:
        d = check_dim(d, minimum=5)
        lower = -math.expm1(-1.0)
        upper = lower + SQRT5_16 / d
        e_upper = 1.0 / (1.0 - upper) if upper < 1.0 else math.inf
        out.append(
            EulerBracket(
                d=d,
                coverage_lower=lower,
                coverage_upper=upper,
                e_lower=1.0 / (1.0 - lower),
                e_upper=e_upper,
            )
        )
    return out


def _ldiv_integrand_one(t: float) -> float:
    # (1 - 2^-t)/t, extended continuously by ln 2 at t = 0
    if t == 0.0:
        return math.log(2.0)
    return -math.expm1(-t * math.log(2.0)) / t

_LDIV_TAIL_CUT = 8.0  # 2^(-e^8) ~ 1e-898: truncation remainder far below 1e-18


def _ldiv_integrand_two(t: float) -> float:
    return math.exp(-math.exp(t) * math.log(2.0))


def ldiv_bracket_sum(method: str = "adaptive") -> float:
    """The bracketed integral sum behind the facet-approximation constant.

    Two independent quadrature routes are provided: "adaptive" (QUADPACK)
    and "gauss" (composite 64-node Gauss-Legendre on fixed panels). The
    doubly-exponential tail is truncated at t=8 with remainder below 1e-890.
    """
    if method == "adaptive":
        i1 = quad(_ldiv_integrand_one, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)[0]
        i2 = quad(_ldiv_integrand_two, 0.0, _LDIV_TAIL_CUT, epsabs=1e-13, epsrel=1e-13)[0]
        return i1 + i2
    if method == "gauss":
        nodes, weights = np.polynomial.legendre.leggauss(64)
        total = 0.0
        panels = [(0.0, 1.0)] + [(a, a + 1.0) for a in np.arange(0.0, _LDIV_TAIL_CUT)]
        integrands = [_ldiv_integrand_one] + [_ldiv_integrand_two] * (len(panels) - 1)
        for (a, b), f in zip(panels, integrands):
            x = 0.5 * (b - a) * nodes + 0.5 * (a + b)
            total += 0.5 * (b - a) * float(np.sum(weights * np.array([f(v) for v in x])))
        return total
    raise DomainError(f"unknown quadrature method {method!r}")


@lru_cache(maxsize=None)
def ldiv_upper_constant() -> float:
    """(pi e)^-1 times the bracketed integral sum, to absolute 1e-10."""
    return ldiv_bracket_sum("adaptive") / (math.pi * math.e)


def efr_reference() -> float:
    """The literal classical reference proportion, for report annotation."""
    return EFR_REFERENCE
