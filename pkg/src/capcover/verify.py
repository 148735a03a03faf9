"""Numerical verification of the Gaussian-geometry facts behind the bounds.

Monte Carlo checks (spanned-cone measure identity, slab positive
correlation), adaptive quadrature checks (truncated-cone integral vs. its
closed bound, exact zone mass vs. its closed bounds), and deterministic
scalar-inequality grids. Every check returns a VerificationReport rather
than raising, so suites can summarize honest failures.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp
from scipy.integrate import quad

from .bounds import SQRT5_8, threshold_caps, zone_bound, zone_coefficient_log
from .caps import Cap, ConeGeometry, ball_volume_log, check_dim, mass_upper_limit, sphere_surface_log
from .errors import DomainError
from .sampling import RngSpec, chunk_generator, chunk_sizes, _normalize_rows
from .special import gauss_tail, log_lower_inc_gamma

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class Slab:
    """Origin-symmetric slab {x : |<x, normal>| <= half_width}."""

    normal: np.ndarray
    half_width: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        object.__setattr__(self, "normal", n)
        if abs(float(np.linalg.norm(n)) - 1.0) > 1e-12:
            raise DomainError("slab normal must be a unit vector")
        if not self.half_width > 0.0:
            raise DomainError(f"slab half width must be positive, got {self.half_width}")

    @property
    def gaussian_mass(self) -> float:
        return 1.0 - 2.0 * gauss_tail(self.half_width)


@dataclass(frozen=True)
class VerificationReport:
    """One named check: passed iff lhs <= rhs + tolerance (or |lhs-rhs| <= tol)."""

    name: str
    passed: bool
    lhs: float
    rhs: float
    tolerance: float
    detail: str = ""

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


# ---------------------------------------------------------------------------
# Spanned-cone measure identity: Gaussian mass of the cone over a cap equals
# the cap's spherical mass.
# ---------------------------------------------------------------------------

def cone_measure_identity_mc(cap: Cap, rng: RngSpec, n_samples: int) -> VerificationReport:
    """Sample standard Gaussians; the normalized point lies in the cap iff
    the Gaussian point lies in the spanned cone. Hit fraction vs. cap mass."""
    if n_samples < 10_000:
        raise DomainError(f"n_samples must be >= 1e4, got {n_samples}")
    if cap.mass >= 1.0:
        return VerificationReport(
            name="cone-measure-identity", passed=True, lhs=1.0, rhs=1.0, tolerance=0.0,
            detail=f"d={cap.d} mass=1 whole sphere, exact",
        )
    hits = 0
    for i, size in enumerate(chunk_sizes(n_samples, rng.chunk_size)):
        gen = chunk_generator(rng, i)
        x = _normalize_rows(gen.standard_normal((size, cap.d)), gen)
        hits += int(((x @ cap.center) >= cap.cos_threshold).sum())
    p = hits / n_samples
    se = math.sqrt(cap.mass * (1.0 - cap.mass) / n_samples)
    return VerificationReport(
        name="cone-measure-identity",
        passed=abs(p - cap.mass) <= 4.0 * se,
        lhs=p,
        rhs=cap.mass,
        tolerance=4.0 * se,
        detail=f"d={cap.d} mass={cap.mass:g} n={n_samples}",
    )


# ---------------------------------------------------------------------------
# Truncated cone: Gaussian mass of (cone over cap) below the cutting plane.
# ---------------------------------------------------------------------------

def truncated_cone_measure(geom: ConeGeometry) -> float:
    """Adaptive quadrature of the truncated-cone integral at the Lambert-W height.

    The cross-section radius grows linearly with slope r/sqrt(1-r^2), where
    r = (f vol(sphere_{d-1}) / vol(ball_{d-1}))^(1/(d-1)); the prefactor and
    the incomplete-gamma factor are combined in log space before
    exponentiating, so the integrand survives every admissible (d, f).
    Absolute target 1e-14 or relative 1e-8, whichever is looser.
    """
    d, f = geom.d, geom.f
    check_dim(d, minimum=5)
    a = 0.5 * (d - 1)
    log_r = (math.log(f) + sphere_surface_log(d) - ball_volume_log(d - 1)) / (d - 1)
    r = math.exp(log_r)
    slope = r / math.sqrt(1.0 - r * r)
    log_c = ball_volume_log(d - 2) - 1.5 * _LN2 - 0.5 * d * math.log(math.pi)

    def integrand(t: float) -> float:
        if t <= 0.0:
            return 0.0
        x = 0.5 * (slope * t) ** 2
        ln = log_c + log_lower_inc_gamma(a, x) - 0.5 * t * t
        return math.exp(ln) if ln > -745.0 else 0.0

    value, _ = quad(integrand, 0.0, geom.eta, epsabs=1e-14, epsrel=1e-8, limit=200)
    return value


def cone_bound_check(geom: ConeGeometry) -> VerificationReport:
    """Truncated-cone mass against its per-cone closed bound (8 sqrt(5)/d) f^((d-3)/(d-1)).

    The assembled two-sided report uses twice this constant, covering both
    caps of an antipodal pair.
    """
    lhs = truncated_cone_measure(geom)
    rhs = (SQRT5_8 / geom.d) * geom.f ** ((geom.d - 3.0) / (geom.d - 1.0))
    return VerificationReport(
        name="truncated-cone-bound",
        passed=lhs <= rhs,
        lhs=lhs,
        rhs=rhs,
        tolerance=0.0,
        detail=f"d={geom.d} f={geom.f:.3e} eta={geom.eta:.4f}",
    )


# ---------------------------------------------------------------------------
# Slab positive correlation.
# ---------------------------------------------------------------------------

def sidak_mc(
    slabs: list[Slab], rng: RngSpec, n_samples: int, n_workers: int = 1
) -> VerificationReport:
    """MC mass of the slab intersection vs. the product of slab masses."""
    m = len(slabs)
    if not (1 <= m <= 32):
        raise DomainError(f"need between 1 and 32 slabs, got {m}")
    if n_samples < 100_000:
        raise DomainError(f"n_samples must be >= 1e5, got {n_samples}")
    d = slabs[0].normal.size
    for s in slabs:
        if s.normal.size != d:
            raise DomainError("slab normals must share one dimension")
    normals = np.array([s.normal for s in slabs])
    widths = np.array([s.half_width for s in slabs])

    def chunk_hits(args) -> int:
        index, size = args
        gen = chunk_generator(rng, index)
        x = gen.standard_normal((size, d))
        inside = (np.abs(x @ normals.T) <= widths).all(axis=1)
        return int(inside.sum())

    tasks = list(enumerate(chunk_sizes(n_samples, rng.chunk_size)))
    if n_workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            hits = sum(pool.map(chunk_hits, tasks))
    else:
        hits = sum(map(chunk_hits, tasks))

    p = hits / n_samples
    product = float(np.prod([s.gaussian_mass for s in slabs]))
    se = math.sqrt(max(p * (1.0 - p), 1e-12) / n_samples)
    return VerificationReport(
        name="slab-positive-correlation",
        passed=p >= product - 4.0 * se,
        lhs=p,
        rhs=product,
        tolerance=4.0 * se,
        detail=f"d={d} m={m} n={n_samples}",
    )


# ---------------------------------------------------------------------------
# Zone mass.
# ---------------------------------------------------------------------------

def zone_quadrature(d: int, n_caps: int) -> float:
    """Exact mass of the equatorial band of half-width arcsin(N^(-1/(d-1))).

    Latitude integral (2 vol(sphere_{d-2}) / vol(sphere_{d-1}))
    * int_0^w cos^(d-2)(phi) dphi, with quadrature to absolute 1e-14. At
    d=3 this reduces to the band height N^(-1/2) exactly.
    """
    d = check_dim(d, minimum=3)
    if n_caps < 2:
        raise DomainError(f"n_caps must be >= 2, got {n_caps}")
    w = math.asin(n_caps ** (-1.0 / (d - 1)))
    coeff = math.exp(zone_coefficient_log(d))
    integral, _ = quad(lambda phi: math.cos(phi) ** (d - 2), 0.0, w, epsabs=1e-14, epsrel=1e-13)
    return coeff * integral


def zone_chain_check(d: int, n_caps: int) -> VerificationReport:
    """quadrature <= full closed bound <= simplified closed bound at (d, N)."""
    q = zone_quadrature(d, n_caps)
    zb = zone_bound(d, n_caps)
    passed = q <= zb.full <= zb.simplified
    return VerificationReport(
        name="zone-chain",
        passed=passed,
        lhs=q,
        rhs=zb.full,
        tolerance=0.0,
        detail=(
            f"d={d} N={n_caps}: quadrature={q:.6e} full={zb.full:.6e} "
            f"simplified={zb.simplified:.6e}"
        ),
    )


# ---------------------------------------------------------------------------
# Deterministic scalar-inequality grids.
# ---------------------------------------------------------------------------

_GRID_POINTS = 100_000


def _grid_report(name: str, lhs: np.ndarray, rhs: np.ndarray, where: np.ndarray, label: str) -> VerificationReport:
    # 1-ulp slack: lhs <= rhs + spacing(rhs)
    slack = np.spacing(np.abs(rhs))
    violation = lhs - rhs - slack
    worst = int(np.argmax(violation))
    passed = bool(violation[worst] <= 0.0)
    return VerificationReport(
        name=name,
        passed=passed,
        lhs=float(lhs[worst]),
        rhs=float(rhs[worst]),
        tolerance=float(slack[worst]),
        detail=f"worst at {label}={where[worst]:.6g}; margin={-float(violation[worst]):.3e}",
    )


def _arcsin_reports() -> list[VerificationReport]:
    t = np.linspace(0.0, 1.0, _GRID_POINTS)
    asin = np.arcsin(t)
    low = t + t**3 / 6.0
    high = t + t**3 / 6.0 + t**5
    return [
        _grid_report("arcsin-lower", low, asin, t, "t"),
        _grid_report("arcsin-upper", asin, high, t, "t"),
    ]


def _quintic_report() -> VerificationReport:
    x = np.linspace(0.0, 1.0, _GRID_POINTS)
    lhs = (1.0 + x / 6.0 + x * x) ** 5
    rhs = 1.0 + 5.0 * x / 6.0 + 47.0 * x * x
    return _grid_report("quintic-polynomial", lhs, rhs, x, "x")


def _binomial_quadratic_report() -> VerificationReport:
    # (1-u)^k <= 1 - k u + k(k-1)/2 u^2, k in {1, 3/2, ..., 100}, u in [0, 1]
    u = np.linspace(0.0, 1.0, _GRID_POINTS)
    worst = (-math.inf, 0.0, 0.0, 0.0, 0.0)  # violation, k, u, lhs, rhs
    for k in np.arange(1.0, 100.0 + 0.25, 0.5):
        lhs = (1.0 - u) ** k
        rhs = 1.0 - k * u + 0.5 * k * (k - 1.0) * u * u
        violation = lhs - rhs - np.spacing(np.abs(rhs))
        i = int(np.argmax(violation))
        if violation[i] > worst[0]:
            worst = (float(violation[i]), float(k), float(u[i]), float(lhs[i]), float(rhs[i]))
    violation, k, u_at, lhs, rhs = worst
    return VerificationReport(
        name="binomial-quadratic",
        passed=violation <= 0.0,
        lhs=lhs,
        rhs=rhs,
        tolerance=float(np.spacing(abs(rhs))),
        detail=f"worst at k={k:g}, u={u_at:.6g}; violation={violation:.3e}"
        + ("" if violation <= 0.0 else " (the bound is false for k in (1,2))"),
    )


def _gauss_tail_sandwich_report() -> VerificationReport:
    h = np.linspace(1.01, 40.0, _GRID_POINTS)
    phi = np.exp(-0.5 * h * h) / math.sqrt(2.0 * math.pi)
    # same two-branch evaluation as special.gauss_tail, vectorized
    scaled = 0.5 * _sp.erfcx(h / math.sqrt(2.0)) * np.exp(-0.5 * h * h)
    q = np.where(h > 30.0, scaled, 0.5 * _sp.erfc(h / math.sqrt(2.0)))
    low = (1.0 / h - 1.0 / h**3) * phi
    high = phi / h
    rep_low = _grid_report("gauss-tail-lower", low, q, h, "h")
    rep_high = _grid_report("gauss-tail-upper", q, high, h, "h")
    passed = rep_low.passed and rep_high.passed
    return VerificationReport(
        name="gauss-tail-sandwich",
        passed=passed,
        lhs=rep_low.lhs if not rep_low.passed else rep_high.lhs,
        rhs=rep_low.rhs if not rep_low.passed else rep_high.rhs,
        tolerance=0.0,
        detail=f"lower: {rep_low.detail} | upper: {rep_high.detail}",
    )


def scalar_inequalities() -> list[VerificationReport]:
    """Deterministic grid checks of the scalar inequalities the bounds rest on.

    No RNG anywhere, so failures reproduce bit-for-bit. The binomial
    quadratic check reports honestly: the inequality is false for exponents
    strictly between 1 and 2, and the grid contains k = 3/2.
    """
    reports = _arcsin_reports()
    reports.append(_quintic_report())
    reports.append(_binomial_quadratic_report())
    reports.append(_gauss_tail_sandwich_report())
    return reports


# ---------------------------------------------------------------------------
# Suites (used by the CLI and the acceptance tests).
# ---------------------------------------------------------------------------

CONE_SUITE_DIMS = (5, 10, 20, 50, 100)
CONE_SUITE_FRACTIONS = (1e-12, 1e-9, 1e-6, None)  # None: half the admissible limit


def cone_suite() -> list[VerificationReport]:
    """Truncated-cone bound over the standard (d, f) grid; 20 checks."""
    from .caps import cone_geometry

    reports = []
    for d in CONE_SUITE_DIMS:
        for f in CONE_SUITE_FRACTIONS:
            mass = 0.5 * mass_upper_limit(d) if f is None else f
            reports.append(cone_bound_check(cone_geometry(d, mass)))
    return reports


def zone_suite(dims=(5, 6, 7)) -> list[VerificationReport]:
    """Zone chain at N = ceil(threshold), 10x threshold, and 1e6 per dimension."""
    reports = []
    for d in dims:
        thr = threshold_caps(d)
        for n in (int(math.ceil(thr)), int(math.ceil(10 * thr)), 10**6):
            reports.append(zone_chain_check(d, n))
    return reports


def sidak_suite(
    rng: RngSpec, n_families: int = 50, n_samples: int = 100_000, n_workers: int = 1
) -> list[VerificationReport]:
    """Randomized slab families (d <= 10, m <= 8) at a fixed master seed."""
    from .sampling import sample_uniform_sphere

    reports = []
    for i in range(n_families):
        gen = chunk_generator(rng.derive(101, i), 0)
        d = int(gen.integers(2, 11))
        m = int(gen.integers(1, 9))
        normals = sample_uniform_sphere(d, rng.derive(102, i), m)
        widths = gen.uniform(0.2, 2.5, size=m)
        slabs = [Slab(normal=n, half_width=float(t)) for n, t in zip(normals, widths)]
        reports.append(sidak_mc(slabs, rng.derive(103, i), n_samples, n_workers=n_workers))
    return reports


CONE_MASS_SUITE_DIMS = (3, 10, 50)
CONE_MASS_SUITE_MASSES = (1e-3, 0.05, 0.3, 0.5)


def cone_mass_suite(rng: RngSpec, n_samples: int = 100_000) -> list[VerificationReport]:
    """Spanned-cone measure identity across dimensions and cap masses."""
    from .caps import cap_from_mass

    reports = []
    for d in CONE_MASS_SUITE_DIMS:
        for mass in CONE_MASS_SUITE_MASSES:
            center = np.zeros(d)
            center[0] = 1.0
            cap = cap_from_mass(center, mass)
            reports.append(cone_measure_identity_mc(cap, rng.derive(104, d, int(mass * 10**9)), n_samples))
    return reports


def run_suite(name: str, rng: RngSpec, n_workers: int = 1) -> list[VerificationReport]:
    """Dispatch a named verification suite."""
    if name == "zone":
        return zone_suite()
    if name == "cone":
        return cone_suite()
    if name == "sidak":
        return sidak_suite(rng, n_workers=n_workers)
    if name == "scalar":
        return scalar_inequalities()
    if name == "conemass":
        return cone_mass_suite(rng)
    if name == "all":
        out = []
        for suite in ("scalar", "zone", "cone", "sidak", "conemass"):
            out.extend(run_suite(suite, rng, n_workers=n_workers))
        return out
    raise DomainError(f"unknown suite {name!r}")
