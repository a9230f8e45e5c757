"""Exhaustive checks of the integer-profile machinery at desk scale.

A profile ``w`` lives on ``Q_{k+1}`` with values in ``{0..A}``; it is
admissible when the discrete velocity

    v_i = lap(w)_i - fbar_i(w_i) + F

is non-negative at every site of ``Q_k``.  This module enumerates admissible
profiles, evaluates the weighted sum ``Y_k`` over them in two algebraically
equivalent forms, estimates the one-shell growth factor ``gamma_k`` and the
conditional expectation of ``Y_{k+1}`` by resampling the disorder on the new
shell, counts shell extensions by total velocity, and checks the rounding of
real-valued snapshots.  All admissibility arithmetic is integer.

Profiles are handled as flat integer rows; column ``p`` holds the value at the
``p``-th site of the enclosing cube in lexicographic order.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .disorder import ObstacleDistribution, QuenchedField, derive_seed, fbar_table
from .lattice import HeightField, compositions, cube_sites, neighbor_offsets, xi

__all__ = [
    "BUDGET",
    "BudgetExceeded",
    "IdentityViolation",
    "DiscreteProfile",
    "FrozenDisorder",
    "ProfileSet",
    "is_admissible",
    "enumerate_Pk",
    "min_avg_velocity",
    "Y_k",
    "gamma_k_mc",
    "conditional_Y_next_mc",
    "supermartingale_check",
    "extension_velocity_counts",
    "count_extensions_by_velocity",
    "extension_bound_margin",
    "round_and_check",
]

BUDGET = 10**8
CHUNK_ROWS = 1 << 18
GAMMA_STREAM = 1
DIRECT_STREAM = 2


class BudgetExceeded(RuntimeError):
    """The exhaustive search would exceed the candidate budget."""


class IdentityViolation(AssertionError):
    """Two algebraically equal quantities disagreed."""


@functools.lru_cache(maxsize=None)
def _geometry(R: int, d: int):
    sites = cube_sites(R, d)
    level = np.abs(sites).max(axis=1) + 1  # site is in Q_m iff level <= m
    index = {tuple(s): p for p, s in enumerate(sites.tolist())}
    offs = neighbor_offsets(d)
    nbrs = np.full((len(sites), 2 * d), -1, dtype=np.int64)
    for p, s in enumerate(sites.tolist()):
        for q, e in enumerate(offs.tolist()):
            nbrs[p, q] = index.get(tuple(a + b for a, b in zip(s, e)), -1)
    return sites, level, index, nbrs


def _value_dtype(A: int):
    return np.int8 if A < 127 else np.int64


@dataclass(frozen=True)
class FrozenDisorder:
    """Integer table ``fbar_i(j)`` for sites ``i`` in ``Q_radius`` and ``0 <= j <= A``.

    ``table`` has one row per site of ``Q_radius`` in lexicographic order.
    """

    radius: int
    d: int
    A: int
    table: np.ndarray

    def __post_init__(self):
        n = (2 * self.radius - 1) ** self.d
        if self.table.shape != (n, self.A + 1):
            raise ValueError(f"table shape {self.table.shape} != {(n, self.A + 1)}")
        if np.any(self.table < 0) or np.any(self.table[:, 0] != 0):
            raise ValueError("fbar entries must be non-negative with fbar(0) = 0")

    @classmethod
    def zero(cls, radius: int, d: int, A: int) -> "FrozenDisorder":
        return cls(radius, d, A, np.zeros(((2 * radius - 1) ** d, A + 1), dtype=np.int64))

    @classmethod
    def from_field(cls, fld: QuenchedField, radius: int, A: int, center=None) -> "FrozenDisorder":
        """Materialise ``fbar`` around ``center`` (origin by default).

        Cube site ``i`` reads the field at ``center + i``.
        """
        sites = cube_sites(radius, fld.d)
        if center is not None:
            sites = sites + np.asarray(center, dtype=np.int64)
        heights = np.arange(A + 1, dtype=np.int64)
        table = np.asarray(fld.fbar(sites[:, None, :], heights[None, :]), dtype=np.int64)
        return cls(radius, fld.d, A, table.reshape(len(sites), A + 1))

    def value(self, site, height: int) -> int:
        _, _, index, _ = _geometry(self.radius, self.d)
        return int(self.table[index[tuple(int(x) for x in site)], height])

    def on(self, R: int) -> np.ndarray:
        """Table re-indexed to the sites of ``Q_R``; rows outside coverage are zero."""
        sites, level, _, _ = _geometry(R, self.d)
        _, _, index, _ = _geometry(self.radius, self.d)
        out = np.zeros((len(sites), self.A + 1), dtype=np.int64)
        for p in np.flatnonzero(level <= self.radius):
            out[p] = self.table[index[tuple(sites[p].tolist())]]
        return out


@dataclass
class DiscreteProfile:
    """Integer profile on ``Q_{k+1}``, array shape ``(2k+1,)*d``."""

    k: int
    d: int
    A: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64)
        if self.values.shape != (2 * self.k + 1,) * self.d:
            raise ValueError(f"profile shape {self.values.shape} does not fit Q_{self.k + 1}")
        if self.values.min() < 0 or self.values.max() > self.A:
            raise ValueError(f"profile values must lie in 0..{self.A}")

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()


def _lap_rows(W: np.ndarray, nbrs: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Laplacian of every row of ``W`` at columns ``cols``; all neighbours must exist."""
    W = W.astype(np.int64, copy=False)
    return W[:, nbrs[cols]].sum(axis=2) - nbrs.shape[1] * W[:, cols]


def _velocities(W, nbrs, cols, fb, F) -> np.ndarray:
    W64 = W.astype(np.int64, copy=False)
    return _lap_rows(W64, nbrs, cols) - fb[cols, W64[:, cols]] + F


def _flux_rows(W: np.ndarray, R: int, d: int, k: int) -> np.ndarray:
    """Boundary flux across the faces of ``Q_k`` for profiles on ``Q_R``."""
    sites, level, _, nbrs = _geometry(R, d)
    ii, rr = [], []
    for p in np.flatnonzero(level <= k):
        for q in nbrs[p]:
            if level[q] > k:
                ii.append(p)
                rr.append(q)
    W = W.astype(np.int64, copy=False)
    return W[:, rr].sum(axis=1) - W[:, ii].sum(axis=1)


def _check_budget(A: int, n_sites: int, what: str) -> None:
    if (A + 1) ** n_sites > BUDGET:
        raise BudgetExceeded(
            f"{what}: {(A + 1)}^{n_sites} candidates exceed the budget of {BUDGET}; "
            "shrink k, d or A"
        )


def _iter_admissible(R: int, d: int, A: int, fb: np.ndarray, F: int, k: int,
                     chunk: int = CHUNK_ROWS) -> Iterator[np.ndarray]:
    """Chunks of profiles on ``Q_R`` admissible on ``Q_k``, in lexicographic order.

    Sites are filled in lexicographic order; a constraint at site ``i`` is
    tested as soon as the last of ``i`` and its neighbours has been filled.
    """
    sites, level, _, nbrs = _geometry(R, d)
    n = len(sites)
    _check_budget(A, n, f"profiles on Q_{R}")
    cons = np.flatnonzero(level <= k)
    done_at: dict[int, list[int]] = {}
    for p in cons:
        done_at.setdefault(int(max(p, nbrs[p].max())), []).append(int(p))
    checks = {pos: np.array(ps) for pos, ps in done_at.items()}
    vals = np.arange(A + 1, dtype=_value_dtype(A))

    def expand(rows: np.ndarray, pos: int):
        if pos == n:
            yield rows
            return
        new = np.repeat(rows, A + 1, axis=0)
        new[:, pos] = np.tile(vals, len(rows))
        if pos in checks:
            ok = np.all(_velocities(new, nbrs, checks[pos], fb, F) >= 0, axis=1)
            new = new[ok]
        if len(new) == 0:
            return
        if len(new) > chunk:
            for start in range(0, len(new), chunk):
                yield from expand(new[start:start + chunk], pos + 1)
        else:
            yield from expand(new, pos + 1)

    yield from expand(np.zeros((1, n), dtype=_value_dtype(A)), 0)


def _check_disorder(disorder: FrozenDisorder, k: int, d: int, A: int) -> None:
    if disorder.d != d:
        raise ValueError("disorder dimension mismatch")
    if disorder.radius < k or disorder.A < A:
        raise ValueError(
            f"disorder covers Q_{disorder.radius} up to height {disorder.A}; "
            f"need Q_{k} up to height {A}"
        )


def _fb(disorder: FrozenDisorder, R: int, A: int) -> np.ndarray:
    return disorder.on(R)[:, : A + 1]


def is_admissible(w: DiscreteProfile, disorder: FrozenDisorder, F: int) -> bool:
    _check_disorder(disorder, w.k, w.d, int(w.values.max()))
    R = w.k + 1
    _, level, _, nbrs = _geometry(R, w.d)
    fb = disorder.on(R)
    v = _velocities(w.flat[None, :], nbrs, np.flatnonzero(level <= w.k), fb, F)
    return bool(np.all(v >= 0))


@dataclass
class ProfileSet:
    k: int
    d: int
    A: int
    values: np.ndarray  # (count, |Q_{k+1}|), lexicographic order

    @property
    def count(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return self.count

    def __iter__(self) -> Iterator[DiscreteProfile]:
        shape = (2 * self.k + 1,) * self.d
        for row in self.values:
            yield DiscreteProfile(self.k, self.d, self.A, row.reshape(shape))


def enumerate_Pk(k: int, d: int, A: int, disorder: FrozenDisorder, F: int) -> ProfileSet:
    """All admissible profiles on ``Q_{k+1}``."""
    _check_disorder(disorder, k, d, A)
    chunks = list(_iter_admissible(k + 1, d, A, _fb(disorder, k + 1, A), F, k))
    n = (2 * k + 1) ** d
    values = np.concatenate(chunks) if chunks else np.zeros((0, n), dtype=_value_dtype(A))
    return ProfileSet(k, d, A, values)


def min_avg_velocity(k: int, d: int, A: int, disorder: FrozenDisorder, F: int) -> Fraction:
    """Minimum over admissible profiles of the mean velocity on ``Q_k`` (exact)."""
    _check_disorder(disorder, k, d, A)
    R = k + 1
    _, level, _, nbrs = _geometry(R, d)
    cols = np.flatnonzero(level <= k)
    fb = _fb(disorder, R, A)
    best = None
    for W in _iter_admissible(R, d, A, fb, F, k):
        m = int(_velocities(W, nbrs, cols, fb, F).sum(axis=1).min())
        best = m if best is None else min(best, m)
    return Fraction(best, len(cols))


class _LogSumExp:
    def __init__(self):
        self.m = -math.inf
        self.s = 0.0

    def add(self, x: np.ndarray) -> None:
        if x.size == 0:
            return
        mx = float(x.max())
        if mx > self.m:
            self.s = self.s * math.exp(self.m - mx) if self.s else 0.0
            self.m = mx
        self.s += float(np.exp(x - self.m).sum())

    @property
    def log(self) -> float:
        return self.m + math.log(self.s) if self.s > 0 else -math.inf


@dataclass(frozen=True)
class YResult:
    value: float  # boundary-flux form
    log_value: float
    laplacian_form: float
    rel_diff: float
    count: int


def Y_k(k: int, d: int, A: int, disorder: FrozenDisorder, F: int, lam: float, mu: float,
        rtol: float = 1e-12) -> YResult:
    """``sum over admissible w of exp(lam * flux(w) - mu * sum_{Q_k} v(w))``.

    The same sum is recomputed with the flux replaced by the summed Laplacian;
    the two must agree to relative ``rtol``.
    """
    if not mu > lam > 0:
        raise ValueError("need mu > lambda > 0")
    _check_disorder(disorder, k, d, A)
    R = k + 1
    _, level, _, nbrs = _geometry(R, d)
    cols = np.flatnonzero(level <= k)
    fb = _fb(disorder, R, A)
    flux_form, lap_form = _LogSumExp(), _LogSumExp()
    count = 0
    for W in _iter_admissible(R, d, A, fb, F, k):
        W64 = W.astype(np.int64)
        lap = _lap_rows(W64, nbrs, cols).sum(axis=1)
        obstacle = fb[cols, W64[:, cols]].sum(axis=1)
        vsum = lap - obstacle + F * len(cols)
        flux = _flux_rows(W64, R, d, k)
        flux_form.add(lam * flux - mu * vsum)
        lap_form.add((lam - mu) * lap - mu * (F * len(cols) - obstacle))
        count += len(W)
    a, b = flux_form.log, lap_form.log
    rel = abs(math.expm1(b - a)) if math.isfinite(a) else 0.0
    if rel > rtol:
        raise IdentityViolation(f"Y_k forms disagree: relative difference {rel:.3e}")
    return YResult(math.exp(a), a, math.exp(b), rel, count)


@dataclass(frozen=True)
class _Shell:
    """Geometry of the extension of a profile on Q_{k+1} to Q_{k+2}."""

    ring: np.ndarray  # columns (in Q_{k+2} numbering) of Q_{k+1} \ Q_k
    outer: np.ndarray  # outer columns adjacent to the ring
    n_idle: int  # outer sites with no ring neighbour
    embed: np.ndarray  # Q_{k+2} column of each Q_{k+1} column
    inner_part: np.ndarray  # (|Q_{k+1}|, c) coefficients of base Laplacian
    outer_part: np.ndarray  # (|outer|, c) outer-neighbour incidence


@functools.lru_cache(maxsize=None)
def _shell(k: int, d: int) -> _Shell:
    sites2, level2, index2, nbrs2 = _geometry(k + 2, d)
    sites1, _, _, _ = _geometry(k + 1, d)
    embed = np.array([index2[tuple(s)] for s in sites1.tolist()])
    pos1 = {int(c): p for p, c in enumerate(embed)}
    ring = np.flatnonzero(level2 == k + 1)
    outer_all = np.flatnonzero(level2 == k + 2)
    touching = sorted({int(q) for r in ring for q in nbrs2[r] if level2[q] == k + 2})
    outer = np.array(touching, dtype=np.int64)
    opos = {int(c): p for p, c in enumerate(outer)}
    inner_part = np.zeros((len(sites1), len(ring)), dtype=np.int64)
    outer_part = np.zeros((len(outer), len(ring)), dtype=np.int64)
    for j, r in enumerate(ring):
        inner_part[pos1[int(r)], j] -= 2 * d
        for q in nbrs2[r]:
            if level2[q] <= k + 1:
                inner_part[pos1[int(q)], j] += 1
            else:
                outer_part[opos[int(q)], j] += 1
    return _Shell(ring, outer, len(outer_all) - len(outer), embed, inner_part, outer_part)


def _extension_table(k: int, d: int, A: int):
    sh = _shell(k, d)
    _check_budget(A, len(sh.outer), "shell extensions")
    E = np.array(list(itertools.product(range(A + 1), repeat=len(sh.outer))), dtype=np.int64)
    E = E.reshape(-1, len(sh.outer))
    return sh, E @ sh.outer_part  # (n_ext, c) outer contribution to each ring Laplacian


def _ring_fbar_resamples(distribution, seed, stream, S, ring_sites, A) -> np.ndarray:
    seeds = [derive_seed(seed, stream, s) for s in range(S)]
    return fbar_table(distribution, seeds, ring_sites, np.arange(A + 1))


@dataclass(frozen=True)
class MCResult:
    mean: float
    se: float
    samples: int


@dataclass(frozen=True)
class GammaEstimate:
    value: float  # max over profiles of the estimated extension sum
    se: float  # standard error of the maximising profile's estimate
    argmax: int
    means: np.ndarray
    ses: np.ndarray
    profiles: ProfileSet


def gamma_k_mc(k: int, d: int, A: int, inner: FrozenDisorder, F: int, lam: float, mu: float,
               resamples: int, distribution: ObstacleDistribution, seed: int = 0,
               chunk: int = 512) -> GammaEstimate:
    """Monte Carlo estimate of the shell growth factor ``gamma_k``.

    For each admissible ``w`` (exact enumeration with the frozen inner
    disorder) the expected extension sum is estimated by resampling ``fbar``
    on the shell ``Q_{k+1} \\ Q_k``; the estimate is the largest of these.
    """
    if resamples < 100:
        raise ValueError("gamma_k_mc needs at least 100 resamples")
    if not mu > lam > 0:
        raise ValueError("need mu > lambda > 0")
    P = enumerate_Pk(k, d, A, inner, F)
    sh, EO = _extension_table(k, d, A)
    c = len(sh.ring)
    sites2 = _geometry(k + 2, d)[0]
    ring_sites = sites2[sh.ring]
    fb_ring = _ring_fbar_resamples(distribution, seed, GAMMA_STREAM, resamples, ring_sites, A)
    mult = float((A + 1) ** sh.n_idle)

    W = P.values.astype(np.int64)
    base = W @ sh.inner_part  # (P, c)
    wring = W[:, np.searchsorted(sh.embed, sh.ring)]  # ring values, (P, c)
    lap_sum = base.sum(axis=1)[:, None] + EO.sum(axis=1)[None, :]  # (P, n_ext)
    means = np.empty(len(W))
    ses = np.empty(len(W))
    for p in range(len(W)):
        g = fb_ring[:, np.arange(c), wring[p]]  # (S, c)
        vals = np.empty(resamples)
        for s0 in range(0, resamples, chunk):
            gs = g[s0:s0 + chunk]
            v = base[p][None, None, :] + EO[None, :, :] - gs[:, None, :] + F
            ok = np.all(v >= 0, axis=2)
            expo = (lam - mu) * lap_sum[p][None, :] + mu * gs.sum(axis=1)[:, None] - mu * c * F
            vals[s0:s0 + chunk] = (np.exp(expo) * ok).sum(axis=1) * mult
        means[p] = vals.mean()
        ses[p] = vals.std(ddof=1) / math.sqrt(resamples)
    i = int(np.argmax(means))
    return GammaEstimate(float(means[i]), float(ses[i]), i, means, ses, P)


def conditional_Y_next_mc(k: int, d: int, A: int, inner: FrozenDisorder, F: int, lam: float,
                          mu: float, resamples: int, distribution: ObstacleDistribution,
                          seed: int = 0, chunk: int = 256) -> MCResult:
    """Monte Carlo estimate of ``E(Y_{k+1} | inner disorder on Q_k)``.

    ``Y_{k+1}`` is evaluated directly from its definition, enumerating
    profiles on ``Q_{k+2}`` for every fresh draw of the shell disorder.
    """
    _check_disorder(inner, k, d, A)
    R = k + 2
    sites, level, _, nbrs = _geometry(R, d)
    fb_inner = _fb(inner, R, A)
    fb_inner[level > k] = 0
    cand = np.concatenate(list(_iter_admissible(R, d, A, fb_inner, F, k))).astype(np.int64)
    inner_cols = np.flatnonzero(level <= k)
    ring_cols = np.flatnonzero(level == k + 1)
    c = len(ring_cols)
    v_inner = _velocities(cand, nbrs, inner_cols, fb_inner, F).sum(axis=1)
    lap_ring = _lap_rows(cand, nbrs, ring_cols)  # (n_cand, c)
    flux = _flux_rows(cand, R, d, k + 1)
    wring = cand[:, ring_cols]
    fb_ring = _ring_fbar_resamples(distribution, seed, DIRECT_STREAM, resamples, sites[ring_cols], A)

    fixed = lam * flux - mu * (v_inner + lap_ring.sum(axis=1) + c * F)
    shift = float(fixed.max())  # keeps exp() in range; undone below
    vals = np.empty(resamples)
    for s0 in range(0, resamples, chunk):
        g = fb_ring[s0:s0 + chunk][:, np.arange(c)[None, :], wring]  # (S, n_cand, c)
        ok = np.all(lap_ring[None] - g + F >= 0, axis=2)
        expo = fixed[None, :] + mu * g.sum(axis=2) - shift
        vals[s0:s0 + chunk] = (np.exp(expo) * ok).sum(axis=1)
    vals *= math.exp(shift)
    return MCResult(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(resamples)), resamples)


@dataclass(frozen=True)
class SupermartingaleResult:
    lhs: float  # estimate of E(Y_{k+1} | B_k)
    lhs_se: float
    gamma: float
    gamma_se: float
    Y: float
    se: float  # combined standard error of lhs - gamma * Y
    margin: float  # gamma * Y + 3 se - lhs; non-negative means pass

    @property
    def passed(self) -> bool:
        return self.margin >= 0


def supermartingale_check(k: int, d: int, A: int, inner: FrozenDisorder, F: int, lam: float,
                          mu: float, resamples: int, distribution: ObstacleDistribution,
                          seed: int = 0) -> SupermartingaleResult:
    """Compare ``E(Y_{k+1} | B_k)`` with ``gamma_k * Y_k`` using independent draws."""
    Y = Y_k(k, d, A, inner, F, lam, mu).value
    gam = gamma_k_mc(k, d, A, inner, F, lam, mu, resamples, distribution, seed)
    lhs = conditional_Y_next_mc(k, d, A, inner, F, lam, mu, resamples, distribution, seed)
    se = math.hypot(lhs.se, Y * gam.se)
    margin = gam.value * Y + 3.0 * se - lhs.mean
    return SupermartingaleResult(lhs.mean, lhs.se, gam.value, gam.se, Y, se, margin)


def extension_velocity_counts(k: int, d: int, A: int, disorder: FrozenDisorder, F: int,
                              profiles: np.ndarray) -> np.ndarray:
    """Counts of admissible shell extensions by total shell velocity.

    ``profiles`` holds flat rows on ``Q_{k+1}``.  Returns an integer array
    ``M[p, j]``: the number of extensions of profile ``p`` to ``Q_{k+2}`` with
    values in ``0..A`` that keep every shell site non-negative and whose shell
    velocities sum to ``j``.
    """
    _check_disorder(disorder, k + 1, d, A)
    sh, EO = _extension_table(k, d, A)
    fb = _fb(disorder, k + 1, A)
    _, level1, _, _ = _geometry(k + 1, d)
    ring1 = np.flatnonzero(level1 == k + 1)
    W = np.atleast_2d(np.asarray(profiles, dtype=np.int64))
    base = W @ sh.inner_part
    g = fb[ring1[None, :], W[:, ring1]]  # (P, c); ring order matches in both numberings
    v = base[:, None, :] + EO[None, :, :] - g[:, None, :] + F  # (P, n_ext, c)
    ok = np.all(v >= 0, axis=2)
    j = np.where(ok, v.sum(axis=2), -1)
    jmax = max(int(j.max()), 0)
    out = np.zeros((len(W), jmax + 1), dtype=np.int64)
    for p in range(len(W)):
        jj = j[p][j[p] >= 0]
        out[p] = np.bincount(jj, minlength=jmax + 1)
    return out * (A + 1) ** sh.n_idle


def count_extensions_by_velocity(k: int, d: int, A: int, disorder: FrozenDisorder, F: int,
                                 w_inner: DiscreteProfile, j: int) -> int:
    counts = extension_velocity_counts(k, d, A, disorder, F, w_inner.flat[None, :])[0]
    return int(counts[j]) if 0 <= j < len(counts) else 0


def extension_bound_margin(k: int, d: int, A: int, counts: np.ndarray) -> int:
    """Smallest ``N(c, j) * (A+1)^xi - M_j`` over all profiles and velocities ``j``."""
    from .lattice import c as shell_size

    m = shell_size(k, d)
    free = (A + 1) ** xi(k, d)
    bound = np.array([compositions(m, j) * free for j in range(counts.shape[1])], dtype=object)
    diff = bound[None, :] - counts.astype(object)
    return int(diff.min())


def round_and_check(u: HeightField, disorder: FrozenDisorder, F: float):
    """Round a real profile on ``Q_{k+1}`` half-up and test the slack inequality.

    Returns ``(profile, ok)`` where ``ok`` says whether
    ``lap(w)_i - 2d - fbar_i(w_i) + floor(F) >= 0`` on ``Q_k``.
    """
    if u.periodic:
        raise ValueError("round_and_check needs a cube-domain field")
    k, d = u.domain.k - 1, u.d
    A = disorder.A
    vals = np.asarray(u.values, dtype=np.float64)
    if vals.min() < 0 or vals.max() >= A + 0.5:
        raise ValueError(f"heights must lie in [0, {A + 0.5})")
    _check_disorder(disorder, k, d, A)
    w = np.floor(vals + 0.5).astype(np.int64)
    profile = DiscreteProfile(k, d, A, w)
    R = k + 1
    _, level, _, nbrs = _geometry(R, d)
    cols = np.flatnonzero(level <= k)
    fb = disorder.on(R)
    slack = _velocities(w.ravel()[None, :], nbrs, cols, fb, math.floor(F) - 2 * d)
    return profile, bool(np.all(slack >= 0))
