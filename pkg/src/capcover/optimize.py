"""Derivative-free local search over cap centers to maximize coverage.

Hill climbing on a common-random-numbers surrogate: each restart draws one
fixed evaluation point set, so acceptance decisions compare deterministic
values instead of resampled noise. The winning configuration is re-measured
on a fresh, disjoint stream to guard against overfitting the surrogate.

This is exploratory machinery: it produces empirical lower envelopes per
dimension, not certified optima.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import TheoremInputs, theorem_bounds
from .caps import cap_from_mass, check_dim, mass_upper_limit, radius_from_mass
from .coverage import CoverageEstimate, expected_random_coverage, mc_coverage
from .errors import DomainError
from .sampling import Configuration, RngSpec, chunk_generator, sample_uniform_sphere
from .verify import VerificationReport


@dataclass(frozen=True)
class OptimizerConfig:
    steps: int = 4000
    restarts: int = 3
    initial_step_angle: float = 0.5
    decay: float = 0.85
    crn_samples: int = 16384
    rng: RngSpec = field(default_factory=lambda: RngSpec(0))
    antipodal: bool = False

    def __post_init__(self):
        if self.steps < 1 or self.restarts < 1:
            raise DomainError("steps and restarts must be positive")
        if not (0.0 < self.initial_step_angle < math.pi):
            raise DomainError(f"initial_step_angle must lie in (0, pi), got {self.initial_step_angle}")
        if not (0.0 < self.decay < 1.0):
            raise DomainError(f"decay must lie in (0, 1), got {self.decay}")
        if self.crn_samples < 10_000:
            raise DomainError(f"crn_samples must be >= 1e4, got {self.crn_samples}")


@dataclass(frozen=True)
class OptimizationTrace:
    best_coverage: CoverageEstimate  # fresh-seed re-estimate of the winner
    objective_history: list[float]  # per-step surrogate value; nondecreasing
    final_config: Configuration
    random_baseline: float
    theorem_upper: float | None  # None when d < 5
    final_objective: float

    def to_record(self, max_history: int = 1000) -> dict:
        hist = self.objective_history
        if len(hist) > max_history:
            idx = np.linspace(0, len(hist) - 1, max_history).round().astype(int)
            hist = [hist[i] for i in idx]
        from .sampling import configuration_to_json

        return {
            "bestCoverage": self.best_coverage.to_record(),
            "objectiveHistory": hist,
            "finalConfig": configuration_to_json(self.final_config),
            "randomBaseline": self.random_baseline,
            "theoremUpper": self.theorem_upper,
            "finalObjective": self.final_objective,
        }


def crn_objective(config: Configuration, crn_points: np.ndarray) -> float:
    """Covered fraction of the fixed point set; deterministic given both."""
    if config.n_caps == 0:
        raise DomainError("empty configuration")
    covered = (crn_points @ config.centers().T >= config.thresholds()).any(axis=1)
    return float(covered.mean())


def _tangent_direction(center: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    while True:
        v = gen.standard_normal(center.size)
        v -= (v @ center) * center
        norm = float(np.linalg.norm(v))
        if norm > 1e-12:
            return v / norm


def _climb_restart(d, n_caps, alpha, cfg, restart):
    mass = alpha / n_caps
    radius = radius_from_mass(d, mass)
    threshold = math.cos(radius)
    crn = sample_uniform_sphere(d, cfg.rng.derive(201, restart), cfg.crn_samples)
    move_gen = chunk_generator(cfg.rng.derive(202, restart), 0)

    if cfg.antipodal:
        half = sample_uniform_sphere(d, cfg.rng.derive(203, restart), n_caps // 2)
        centers = np.empty((n_caps, d))
        centers[0::2] = half
        centers[1::2] = -half
    else:
        centers = sample_uniform_sphere(d, cfg.rng.derive(203, restart), n_caps)

    # per-point count of covering caps; moves adjust it incrementally
    counts = ((crn @ centers.T) >= threshold).sum(axis=1).astype(np.int32)
    objective = float((counts > 0).mean())
    n_units = n_caps // 2 if cfg.antipodal else n_caps
    step = cfg.initial_step_angle
    window = max(1, cfg.steps // 10)
    idle = 0
    history = []

    for _ in range(cfg.steps):
        unit = int(move_gen.integers(n_units))
        j = 2 * unit if cfg.antipodal else unit
        old = centers[j]
        tangent = _tangent_direction(old, move_gen)
        new = math.cos(step) * old + math.sin(step) * tangent
        new /= float(np.linalg.norm(new))

        delta = ((crn @ new) >= threshold).astype(np.int32) - ((crn @ old) >= threshold).astype(np.int32)
        if cfg.antipodal:
            delta += ((crn @ -new) >= threshold).astype(np.int32) - ((crn @ -old) >= threshold).astype(np.int32)
        trial_counts = counts + delta
        trial_objective = float((trial_counts > 0).mean())

        if trial_objective > objective:
            centers[j] = new
            if cfg.antipodal:
                centers[j + 1] = -new
            counts = trial_counts
            objective = trial_objective
            idle = 0
        else:
            idle += 1
            if idle >= window:
                step *= cfg.decay
                idle = 0
        history.append(objective)

    return objective, centers, history, mass


def local_search(d: int, n_caps: int, alpha: float, cfg: OptimizerConfig) -> OptimizationTrace:
    """Best-of-restarts hill climb over cap centers at fixed per-cap mass alpha/N."""
    d = check_dim(d)
    if n_caps < 1:
        raise DomainError(f"n_caps must be >= 1, got {n_caps}")
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if alpha / n_caps > 1.0:
        raise DomainError("per-cap mass alpha/N exceeds 1")
    if cfg.antipodal:
        if n_caps % 2 != 0:
            raise DomainError("antipodal search needs an even cap count")
        if alpha / n_caps >= mass_upper_limit(d):
            raise DomainError(
                f"antipodal per-cap mass {alpha / n_caps:.3e} >= admissible limit for d={d}"
            )

    best = None
    for restart in range(cfg.restarts):
        objective, centers, history, mass = _climb_restart(d, n_caps, alpha, cfg, restart)
        if best is None or objective > best[0]:
            best = (objective, centers, history)
    final_objective, centers, history = best

    caps = tuple(cap_from_mass(c, alpha / n_caps) for c in centers)
    final_config = Configuration(d=d, caps=caps, antipodal=cfg.antipodal, alpha=alpha)
    fresh = mc_coverage(final_config, cfg.rng.derive(299), max(cfg.crn_samples, 20_000))
    baseline = expected_random_coverage(n_caps, alpha)
    upper = None
    if d >= 5:
        upper = theorem_bounds(TheoremInputs(d=d, n_caps=n_caps, alpha=alpha)).upper
    return OptimizationTrace(
        best_coverage=fresh,
        objective_history=history,
        final_config=final_config,
        random_baseline=baseline,
        theorem_upper=upper,
        final_objective=final_objective,
    )


def compare_to_bounds(trace: OptimizationTrace, inputs: TheoremInputs) -> VerificationReport:
    """Final coverage vs. the closed-form window: above the random baseline,
    and below the assembled upper bound whenever that bound binds."""
    best = trace.best_coverage.mean
    se = trace.best_coverage.std_error
    above_baseline = best >= trace.random_baseline - 4.0 * se
    details = [f"baseline={trace.random_baseline:.6f} best={best:.6f} (4se={4 * se:.2e})"]

    upper_ok = True
    rhs = math.inf
    if inputs.d >= 5:
        report = theorem_bounds(inputs)
        if report.precondition_met and report.upper < 1.0:
            rhs = report.upper
            upper_ok = best <= report.upper + 4.0 * se
            details.append(f"upper={report.upper:.6f}")
        else:
            details.append("upper bound vacuous (>= 1 or cap count below threshold)")
    else:
        details.append("upper bound not applicable for d < 5")

    return VerificationReport(
        name="optimizer-vs-bounds",
        passed=bool(above_baseline and upper_ok),
        lhs=best,
        rhs=rhs,
        tolerance=4.0 * se,
        detail="; ".join(details),
    )
