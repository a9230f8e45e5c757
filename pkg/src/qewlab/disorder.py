"""Quenched obstacle fields.

The obstacle force at site ``i`` and height ``y`` is a quartic bump centred on
the nearest integer height ``n``::

    f_i(y) = s[i, n] * (1 - 4 (y - n)^2)^2        for |y - n| <= 1/2

with i.i.d. strengths ``s[i, n] >= 0`` and ``s[i, 0] = 0``.  Strengths are not
stored anywhere: each one is produced on demand by hashing
``(seed, site, height)`` through a counter-based generator, so any worker can
evaluate any part of the infinite field and get bit-identical numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

__all__ = [
    "ObstacleDistribution",
    "QuenchedField",
    "strength",
    "force",
    "fbar",
    "beta",
    "beta_mc",
    "bump",
    "derive_seed",
    "fbar_table",
]

_MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_COORD_KEYS = (
    np.uint64(0xD1B54A32D192ED03),
    np.uint64(0xAEF17502108EF2D9),
    np.uint64(0xDB4F0B9175AE2165),
    np.uint64(0x82E2DF18E84D9F0B),
)
_HEIGHT_KEY = np.uint64(0x8CB92BA72F3D8DD7)


def _u64(x) -> np.ndarray:
    a = np.asarray(x)
    if a.dtype == np.uint64:
        return a
    if a.dtype.kind in "iu":
        return a.astype(np.int64).view(np.uint64) if a.dtype.kind == "i" else a.astype(np.uint64)
    raise TypeError(f"integer input required, got dtype {a.dtype}")


def _mix(z: np.ndarray) -> np.ndarray:
    # splitmix64 finaliser; uint64 arithmetic wraps mod 2**64
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _hash(seed, site, height) -> np.ndarray:
    """64-bit hash of (seed, site coordinates, height), broadcasting over arrays.

    ``site`` has the coordinate axis last.
    """
    site = np.asarray(site)
    if site.ndim == 0:
        site = site.reshape(1)
    with np.errstate(over="ignore"):
        h = _mix(_u64(seed) + _GOLDEN)
        for a in range(site.shape[-1]):
            key = _COORD_KEYS[a % len(_COORD_KEYS)] + np.uint64(a // len(_COORD_KEYS))
            h = _mix(h ^ (_u64(site[..., a]) * key + _GOLDEN))
        return _mix(h ^ (_u64(height) * _HEIGHT_KEY + _GOLDEN))


def _uniform(h: np.ndarray) -> np.ndarray:
    # open interval (0, 1), 53 random bits
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def derive_seed(*parts: int) -> int:
    """Deterministically combine integers into a new 64-bit seed."""
    with np.errstate(over="ignore"):
        h = _mix(np.uint64(len(parts)) + _GOLDEN)
        for p in parts:
            h = _mix(h ^ (_u64(int(p) & _MASK64) + _GOLDEN))
    return int(h)


_KINDS = ("zero", "constant", "uniform", "exponential", "bernoulli-scaled")


@dataclass(frozen=True)
class ObstacleDistribution:
    """Law of a single obstacle strength ``S >= 0``.

    Parameters used per kind: ``constant`` -> ``strength``; ``uniform`` ->
    ``low``, ``high``; ``exponential`` -> ``rate``; ``bernoulli-scaled`` ->
    ``p``, ``strength``.
    """

    kind: str = "zero"
    strength: float = 0.0
    low: float = 0.0
    high: float = 0.0
    rate: float = 1.0
    p: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}; expected one of {_KINDS}")
        if self.kind in ("constant", "bernoulli-scaled") and not self.strength >= 0:
            raise ValueError("strength must be >= 0")
        if self.kind == "uniform" and not 0 <= self.low <= self.high:
            raise ValueError("uniform bounds must satisfy 0 <= low <= high")
        if self.kind == "exponential" and not self.rate > 0:
            raise ValueError("exponential rate must be > 0")
        if self.kind == "bernoulli-scaled" and not 0 <= self.p <= 1:
            raise ValueError("bernoulli probability must lie in [0, 1]")

    @classmethod
    def zero(cls) -> "ObstacleDistribution":
        return cls("zero")

    @classmethod
    def constant(cls, s: float) -> "ObstacleDistribution":
        return cls("constant", strength=s)

    @classmethod
    def uniform(cls, a: float, b: float) -> "ObstacleDistribution":
        return cls("uniform", low=a, high=b)

    @classmethod
    def exponential(cls, rate: float) -> "ObstacleDistribution":
        return cls("exponential", rate=rate)

    @classmethod
    def bernoulli(cls, p: float, s: float) -> "ObstacleDistribution":
        return cls("bernoulli-scaled", p=p, strength=s)

    def to_dict(self) -> dict:
        if self.kind == "zero":
            return {"kind": "zero"}
        if self.kind == "constant":
            return {"kind": "constant", "strength": self.strength}
        if self.kind == "uniform":
            return {"kind": "uniform", "low": self.low, "high": self.high}
        if self.kind == "exponential":
            return {"kind": "exponential", "rate": self.rate}
        return {"kind": "bernoulli-scaled", "p": self.p, "strength": self.strength}

    def check_lambda(self, lam: float) -> None:
        if not lam > 0:
            raise ValueError(f"lambda must be > 0, got {lam}")
        if self.kind == "exponential" and lam >= self.rate:
            raise ValueError(
                f"exponential moment is infinite: lambda={lam} >= rate={self.rate}"
            )

    def sample(self, u: np.ndarray) -> np.ndarray:
        """Map uniforms in (0, 1) to strengths by inversion."""
        u = np.asarray(u, dtype=np.float64)
        if self.kind == "zero":
            return np.zeros_like(u)
        if self.kind == "constant":
            return np.full_like(u, self.strength)
        if self.kind == "uniform":
            return self.low + (self.high - self.low) * u
        if self.kind == "exponential":
            return -np.log(u) / self.rate
        return np.where(u < self.p, self.strength, 0.0)

    def bounded_max(self) -> float | None:
        """Largest attainable strength, or None for unbounded laws."""
        return {
            "zero": 0.0,
            "constant": self.strength,
            "uniform": self.high,
            "exponential": None,
            "bernoulli-scaled": self.strength if self.p > 0 else 0.0,
        }[self.kind]


@dataclass(frozen=True)
class QuenchedField:
    """One fixed realisation of the obstacle field on Z^d x Z."""

    seed: int
    d: int
    distribution: ObstacleDistribution = dc_field(default_factory=ObstacleDistribution.zero)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        object.__setattr__(self, "seed", int(self.seed) & _MASK64)

    def strength(self, site, height):
        return strength(self, site, height)

    def force(self, site, y):
        return force(self, site, y)

    def fbar(self, site, height):
        return fbar(self, site, height)


def _check_site(fld: QuenchedField, site) -> np.ndarray:
    site = np.asarray(site, dtype=np.int64)
    if site.ndim == 0:
        site = site.reshape(1)
    if site.shape[-1] != fld.d:
        raise ValueError(f"site has {site.shape[-1]} coordinates, field dimension is {fld.d}")
    return site


def _scalar_or_array(a: np.ndarray, like_scalar: bool):
    return a.item() if like_scalar else a


def strength(fld: QuenchedField, site, height):
    """Obstacle strength ``s[site, height]``.

    Vectorised: ``site`` may be an array with coordinates on the last axis and
    ``height`` any broadcast-compatible integer array.  Returns a Python float
    for a single site/height.
    """
    s = _check_site(fld, site)
    h = np.asarray(height, dtype=np.int64)
    scalar = s.ndim == 1 and h.ndim == 0
    u = _uniform(_hash(fld.seed, s, h))
    vals = fld.distribution.sample(u)
    vals = np.where(h == 0, 0.0, vals)
    return _scalar_or_array(np.asarray(vals, dtype=np.float64), scalar)


def bump(r):
    """Unit bump ``(1 - 4 r^2)^2`` on ``|r| <= 1/2``, zero outside."""
    r = np.asarray(r, dtype=np.float64)
    q = 1.0 - 4.0 * r * r
    return np.where(np.abs(r) <= 0.5, q * q, 0.0)


def force(fld: QuenchedField, site, y):
    """Obstacle force ``f_site(y)``; continuous and locally Lipschitz in ``y``."""
    s = _check_site(fld, site)
    y = np.asarray(y, dtype=np.float64)
    scalar = s.ndim == 1 and y.ndim == 0
    n = np.floor(y + 0.5)
    out = strength(fld, s, n.astype(np.int64)) * bump(y - n)
    return _scalar_or_array(np.asarray(out, dtype=np.float64), scalar)


def fbar(fld: QuenchedField, site, height):
    """Integer ceiling of the window supremum of ``f`` around ``height``.

    The bump profile peaks at the window centre and vanishes on the window
    edges, so the supremum is the centre strength itself.
    """
    s = np.asarray(strength(fld, site, height))
    out = np.ceil(s).astype(np.int64)
    return out.item() if out.ndim == 0 else out


def beta(distribution: ObstacleDistribution, lam: float) -> float:
    """Closed form of ``E exp(lam * ceil(S))`` for a single strength ``S``."""
    distribution.check_lambda(lam)
    kind = distribution.kind
    if kind == "zero":
        return 1.0
    if kind == "constant":
        return math.exp(lam * math.ceil(distribution.strength))
    if kind == "bernoulli-scaled":
        p = distribution.p
        return (1.0 - p) + p * math.exp(lam * math.ceil(distribution.strength))
    if kind == "exponential":
        r = distribution.rate
        return -math.expm1(-r) * math.exp(lam) / -math.expm1(lam - r)
    a, b = distribution.low, distribution.high
    if a == b:
        return math.exp(lam * math.ceil(a))
    # ceil(S) = n  <=>  S in (n-1, n]
    total = 0.0
    for n in range(math.ceil(a), math.ceil(b) + 1):
        width = min(b, n) - max(a, n - 1)
        if width > 0:
            total += math.exp(lam * n) * width / (b - a)
    return total


def fbar_table(distribution: ObstacleDistribution, seeds, sites, heights) -> np.ndarray:
    """``fbar`` for many independent fields at once.

    Returns an integer array of shape ``(len(seeds), len(sites), len(heights))``;
    entry ``[s, i, j]`` equals ``fbar(QuenchedField(seeds[s], d, distribution),
    sites[i], heights[j])``.
    """
    seeds = np.asarray([int(x) & _MASK64 for x in np.atleast_1d(seeds)], dtype=np.uint64)
    sites = np.asarray(sites, dtype=np.int64)
    heights = np.asarray(heights, dtype=np.int64)
    u = _uniform(_hash(seeds[:, None, None], sites[None, :, None, :], heights[None, None, :]))
    vals = np.where(heights[None, None, :] == 0, 0.0, distribution.sample(u))
    return np.ceil(vals).astype(np.int64)


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    se: float
    samples: int


def beta_mc(fld: QuenchedField, lam: float, samples: int) -> MCEstimate:
    """Monte Carlo estimate of beta from distinct (site, height != 0) pairs."""
    if samples < 100:
        raise ValueError("beta_mc needs at least 100 samples")
    fld.distribution.check_lambda(lam)
    idx = np.arange(samples, dtype=np.int64)
    sites = np.zeros((samples, fld.d), dtype=np.int64)
    sites[:, 0] = idx // 7
    heights = idx % 7 + 1
    x = np.exp(lam * np.asarray(fbar(fld, sites, heights), dtype=np.float64))
    se = float(x.std(ddof=1) / math.sqrt(samples))
    return MCEstimate(float(x.mean()), se, samples)
