"""Coverage of the sphere by a cap configuration.

Monte Carlo in general dimension (brute-force max-dot scan per point; no
spatial index is worth building at desk scale), an exact arc-union oracle on
the circle, and the closed-form expectation for random configurations.

All Monte Carlo paths accumulate integer hit counts per chunk, so results
are deterministic for a given RngSpec no matter how many workers run.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .sampling import Configuration, RngSpec, chunk_generator, chunk_sizes, _normalize_rows

_POINT_BLOCK = 4096  # rows per dot-product block; keeps the score matrix small


@dataclass(frozen=True)
class CoverageEstimate:
    """Monte Carlo estimate of the covered fraction, with provenance."""

    mean: float
    std_error: float
    n_samples: int
    rng: RngSpec
    n_configs: int = 1

    def to_record(self) -> dict:
        return {
            "mean": self.mean,
            "stdError": self.std_error,
            "nSamples": self.n_samples,
            "seed": self.rng.master_seed,
            "nConfigs": self.n_configs,
        }


def _count_hits(points: np.ndarray, centers: np.ndarray, thresholds: np.ndarray) -> int:
    hits = 0
    for start in range(0, points.shape[0], _POINT_BLOCK):
        block = points[start : start + _POINT_BLOCK]
        covered = (block @ centers.T >= thresholds).any(axis=1)
        hits += int(covered.sum())
    return hits


def mc_coverage(
    config: Configuration, rng: RngSpec, n_samples: int, n_workers: int = 1
) -> CoverageEstimate:
    """Fraction of uniform sample points covered by the union of caps.

    Unbiased for the true union mass; a configuration containing a
    whole-sphere cap short-circuits to exactly 1.
    """
    if config.n_caps == 0:
        raise DomainError("cannot estimate coverage of an empty configuration")
    if n_samples < 100:
        raise DomainError(f"n_samples must be >= 100, got {n_samples}")
    if any(cap.mass >= 1.0 for cap in config.caps):
        return CoverageEstimate(1.0, 0.0, n_samples, rng)

    centers = config.centers()
    thresholds = config.thresholds()

    def chunk_hits(args) -> int:
        index, size = args
        gen = chunk_generator(rng, index)
        points = _normalize_rows(gen.standard_normal((size, config.d)), gen)
        return _count_hits(points, centers, thresholds)

    tasks = list(enumerate(chunk_sizes(n_samples, rng.chunk_size)))
    if n_workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            hits = sum(pool.map(chunk_hits, tasks))
    else:
        hits = sum(map(chunk_hits, tasks))

    p = hits / n_samples
    se = math.sqrt(p * (1.0 - p) / n_samples)
    return CoverageEstimate(p, se, n_samples, rng)


def exact_coverage_circle(config: Configuration) -> float:
    """Exact normalized length of the union of arcs for a d=2 configuration.

    Endpoint sorting and interval merging with wraparound; mass m maps to an
    arc of half-angle pi*m around the center's angle.
    """
    if config.d != 2:
        raise DomainError(f"exact arc union requires d=2, got d={config.d}")
    if config.n_caps == 0:
        raise DomainError("cannot measure an empty configuration")
    two_pi = 2.0 * math.pi
    intervals = []
    for cap in config.caps:
        if cap.mass >= 1.0:
            return 1.0
        phi = math.atan2(cap.center[1], cap.center[0])
        half = cap.geodesic_radius
        start = (phi - half) % two_pi
        end = start + 2.0 * half
        if end > two_pi:  # wraps through angle 0
            intervals.append((0.0, end - two_pi))
            intervals.append((start, two_pi))
        else:
            intervals.append((start, end))
    intervals.sort()
    total = 0.0
    cur_start, cur_end = intervals[0]
    for start, end in intervals[1:]:
        if start > cur_end:
            total += cur_end - cur_start
            cur_start, cur_end = start, end
        else:
            cur_end = max(cur_end, end)
    total += cur_end - cur_start
    return min(total / two_pi, 1.0)


def expected_random_coverage(n_caps: int, alpha: float) -> float:
    """Expected covered fraction of n_caps random caps of mass alpha/n_caps.

    Exactly 1 - (1 - alpha/n_caps)^n_caps, dimension-free; evaluated through
    expm1/log1p so large n_caps stays accurate.
    """
    if n_caps < 1:
        raise DomainError(f"n_caps must be >= 1, got {n_caps}")
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    ratio = alpha / n_caps
    if ratio == 1.0:
        return 1.0
    return -math.expm1(n_caps * math.log1p(-ratio))


def mean_coverage_over_configs(
    d: int,
    n_caps: int,
    alpha: float,
    rng: RngSpec,
    n_configs: int,
    n_samples_per_config: int,
    n_workers: int = 1,
) -> CoverageEstimate:
    """Average mc_coverage over independent random configurations.

    The expectation of the returned mean is exactly
    expected_random_coverage(n_caps, alpha), for every dimension.
    """
    from .sampling import random_configuration  # local import to avoid cycle at module load

    if n_configs < 1:
        raise DomainError(f"n_configs must be >= 1, got {n_configs}")
    means = []
    first_estimate = None
    for c in range(n_configs):
        config = random_configuration(d, n_caps, alpha, rng.derive(1, c))
        est = mc_coverage(config, rng.derive(2, c), n_samples_per_config, n_workers=n_workers)
        if first_estimate is None:
            first_estimate = est
        means.append(est.mean)
    if n_configs == 1:
        return CoverageEstimate(
            first_estimate.mean, first_estimate.std_error, n_samples_per_config, rng, 1
        )
    arr = np.asarray(means)
    se = float(arr.std(ddof=1) / math.sqrt(n_configs))
    return CoverageEstimate(
        float(arr.mean()), se, n_configs * n_samples_per_config, rng, n_configs
    )
