"""Reproducible sampling on the sphere and cap configurations.

Determinism contract: every operation that consumes an RngSpec produces
bit-identical output for identical (master_seed, chunk_size), regardless of
how many workers process the chunks. Chunk i of a sample stream draws from
a counter-based Philox generator keyed by a fixed avalanche mix of
(master_seed, i), so parallel scheduling cannot reorder or split a stream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .caps import Cap, cap_from_mass, check_dim, mass_upper_limit
from .errors import DomainError

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(z: int) -> int:
    # splitmix64 output function: the fixed avalanche mixer for stream seeds
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, *tags: int) -> int:
    """Derive a 64-bit stream seed from a master seed and integer tags."""
    z = master_seed & _MASK64
    for t in tags:
        z = _splitmix64((z ^ _splitmix64(t & _MASK64)) & _MASK64)
    return z


@dataclass(frozen=True)
class RngSpec:
    """Master seed plus chunking granularity for deterministic parallel streams."""

    master_seed: int
    chunk_size: int = 1 << 16

    def __post_init__(self):
        if not (0 <= self.master_seed <= _MASK64):
            raise DomainError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if self.chunk_size < 1:
            raise DomainError(f"chunk_size must be positive, got {self.chunk_size}")

    def derive(self, *tags: int) -> "RngSpec":
        """A new spec whose stream is independent of this one, keyed by tags."""
        return RngSpec(derive_seed(self.master_seed, *tags), self.chunk_size)


def chunk_generator(spec: RngSpec, chunk_index: int) -> np.random.Generator:
    """The Philox generator owning chunk chunk_index of spec's stream."""
    return np.random.Generator(np.random.Philox(key=derive_seed(spec.master_seed, chunk_index)))


def chunk_sizes(total: int, chunk_size: int) -> list[int]:
    """Sizes of the consecutive chunks covering total samples."""
    full, rem = divmod(total, chunk_size)
    return [chunk_size] * full + ([rem] if rem else [])


def sample_standard_normals(d: int, spec: RngSpec, count: int) -> np.ndarray:
    """count i.i.d. standard Gaussian vectors in dimension d, chunk-deterministic."""
    d = check_dim(d)
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    parts = []
    for i, n in enumerate(chunk_sizes(count, spec.chunk_size)):
        parts.append(chunk_generator(spec, i).standard_normal((n, d)))
    return np.vstack(parts)


def _normalize_rows(x: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1)
    # a zero draw has probability ~0 but finite precision allows it; resample
    while True:
        bad = norms < 1e-150
        if not bad.any():
            break
        x[bad] = gen.standard_normal((int(bad.sum()), x.shape[1]))
        norms[bad] = np.linalg.norm(x[bad], axis=1)
    return x / norms[:, None]


def sample_uniform_sphere(d: int, spec: RngSpec, count: int) -> np.ndarray:
    """count uniform points on the unit sphere, as rows; Gaussian-normalized.

    Deterministic per RngSpec and invariant under the worker count.
    """
    d = check_dim(d)
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    parts = []
    for i, n in enumerate(chunk_sizes(count, spec.chunk_size)):
        gen = chunk_generator(spec, i)
        parts.append(_normalize_rows(gen.standard_normal((n, d)), gen))
    return np.vstack(parts)


@dataclass(frozen=True)
class Configuration:
    """An ordered family of caps on one sphere, optionally antipodally paired."""

    d: int
    caps: tuple[Cap, ...]
    antipodal: bool = False
    alpha: float | None = None

    def __post_init__(self):
        check_dim(self.d)
        object.__setattr__(self, "caps", tuple(self.caps))
        for cap in self.caps:
            if cap.d != self.d:
                raise DomainError(f"cap dimension {cap.d} does not match configuration d={self.d}")
        if self.antipodal:
            if len(self.caps) % 2 != 0:
                raise DomainError("antipodal configuration needs an even number of caps")
            for k in range(0, len(self.caps), 2):
                a, b = self.caps[k], self.caps[k + 1]
                if not np.allclose(b.center, -a.center, atol=1e-12):
                    raise DomainError(f"caps {k}, {k + 1} are not an antipodal pair")
                if a.mass != b.mass:
                    raise DomainError(f"antipodal pair {k // 2} has unequal masses")

    @property
    def n_caps(self) -> int:
        return len(self.caps)

    @property
    def total_mass(self) -> float:
        return float(sum(cap.mass for cap in self.caps))

    def centers(self) -> np.ndarray:
        return np.array([cap.center for cap in self.caps])

    def thresholds(self) -> np.ndarray:
        return np.array([cap.cos_threshold for cap in self.caps])


def random_configuration(d: int, n_caps: int, alpha: float, spec: RngSpec) -> Configuration:
    """n_caps caps with i.i.d. uniform centers, each of mass exactly alpha/n_caps.

    alpha/n_caps = 1 is the legitimate boundary case (every cap is the whole
    sphere); anything larger is rejected.
    """
    d = check_dim(d)
    if n_caps < 1:
        raise DomainError(f"n_caps must be >= 1, got {n_caps}")
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    mass = alpha / n_caps
    if mass > 1.0:
        raise DomainError(f"per-cap mass alpha/N = {mass} exceeds 1")
    centers = sample_uniform_sphere(d, spec, n_caps)
    template = cap_from_mass(centers[0], mass)
    caps = [
        Cap(
            center=c,
            mass=mass,
            geodesic_radius=template.geodesic_radius,
            cos_threshold=template.cos_threshold,
        )
        for c in centers
    ]
    return Configuration(d=d, caps=tuple(caps), antipodal=False, alpha=alpha)


def antipodal_configuration(centers: np.ndarray, masses) -> Configuration:
    """Pairs (x, -x) of equal mass from the given half-configuration.

    Every mass must lie below the admissible per-cap limit for the dimension.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    masses = list(masses)
    if len(masses) != centers.shape[0]:
        raise DomainError(f"{centers.shape[0]} centers but {len(masses)} masses")
    d = check_dim(centers.shape[1])
    limit = mass_upper_limit(d)
    caps = []
    for x, f in zip(centers, masses):
        if not (0.0 < f < limit):
            raise DomainError(f"pair mass {f} outside (0, {limit:.6g}) for d={d}")
        cap = cap_from_mass(x, f)
        mirror = Cap(
            center=-cap.center,
            mass=cap.mass,
            geodesic_radius=cap.geodesic_radius,
            cos_threshold=cap.cos_threshold,
        )
        caps.extend([cap, mirror])
    return Configuration(d=d, caps=tuple(caps), antipodal=True)


@dataclass(frozen=True)
class ZoneSpec:
    """The equatorial band removed by the antipodal reduction.

    Membership is |x_d| <= n_caps^(-1/(d-1)), the sine of the half-width angle.
    """

    d: int
    n_caps: int
    half_width_angle: float = field(init=False)

    def __post_init__(self):
        check_dim(self.d)
        if self.n_caps < 1:
            raise DomainError(f"n_caps must be >= 1, got {self.n_caps}")
        s = self.n_caps ** (-1.0 / (self.d - 1))
        object.__setattr__(self, "half_width_angle", math.asin(min(s, 1.0)))

    @property
    def sin_half_width(self) -> float:
        return math.sin(self.half_width_angle)


def in_zone(x: np.ndarray, zone: ZoneSpec):
    """Whether the unit vector x (or each row of x) lies in the zone."""
    x = np.asarray(x, dtype=float)
    s = zone.n_caps ** (-1.0 / (zone.d - 1))
    if x.ndim == 1:
        if x.size != zone.d:
            raise DomainError(f"point dimension {x.size} does not match zone d={zone.d}")
        return bool(abs(x[-1]) <= s)
    if x.shape[1] != zone.d:
        raise DomainError(f"point dimension {x.shape[1]} does not match zone d={zone.d}")
    return np.abs(x[:, -1]) <= s


def configuration_to_json(config: Configuration) -> dict:
    """JSON document for a configuration; inverse of configuration_from_json."""
    return {
        "d": config.d,
        "alpha": config.alpha,
        "antipodal": config.antipodal,
        "caps": [
            {"center": [float(v) for v in cap.center], "mass": cap.mass} for cap in config.caps
        ],
    }


def configuration_from_json(doc: dict) -> Configuration:
    """Rebuild a configuration from its JSON document."""
    caps = tuple(cap_from_mass(np.array(c["center"], dtype=float), float(c["mass"])) for c in doc["caps"])
    alpha = doc.get("alpha")
    return Configuration(
        d=int(doc["d"]),
        caps=caps,
        antipodal=bool(doc.get("antipodal", False)),
        alpha=None if alpha is None else float(alpha),
    )


def save_configuration(config: Configuration, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(configuration_to_json(config), fh)


def load_configuration(path) -> Configuration:
    with open(path, encoding="utf-8") as fh:
        return configuration_from_json(json.load(fh))
