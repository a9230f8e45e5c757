"""Explicit Euler integration of the driven lattice interface on a torus.

Each site moves with velocity ``lap(u)_i - f_i(u_i) + F``.  The time step is
capped by ``0.9 / (4d + L)`` with ``L = 8 * s_max`` a Lipschitz bound of the
obstacle force over every height the run can reach; under that cap the Euler
map is monotone, so ordering of initial data, non-negative velocities and the
bound ``u <= F t`` all carry over from the continuous dynamics.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from .disorder import ObstacleDistribution, QuenchedField, bump

__all__ = [
    "SimConfig",
    "SimState",
    "VelocityRecord",
    "VelocitySummary",
    "ObstacleTable",
    "InstabilityError",
    "rhs",
    "step",
    "integrate",
    "velocity_statistics",
    "max_stable_dt",
    "torus_coords",
]

MAX_TABLE_ENTRIES = 50_000_000


class InstabilityError(RuntimeError):
    """Raised when the explicit scheme produces runaway velocities."""


@dataclass(frozen=True)
class SimConfig:
    d: int
    N: int
    F: float
    T: float
    interval: float = 1.0
    dt: float | None = None
    seed: int = 0
    distribution: ObstacleDistribution = dc_field(default_factory=ObstacleDistribution.zero)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.N < 3:
            raise ValueError("N must be >= 3")
        if not self.F >= 0:
            raise ValueError("F must be >= 0")
        if not self.T > 0:
            raise ValueError("T must be > 0")
        if not 0 < self.interval <= self.T:
            raise ValueError("interval must lie in (0, T]")
        n = self.T / self.interval
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise ValueError("T must be an integer multiple of the recording interval")
        if self.dt is not None:
            if not self.dt > 0:
                raise ValueError("dt must be > 0")
            m = self.interval / self.dt
            if abs(m - round(m)) > 1e-9 * max(1.0, m):
                raise ValueError("recording interval must be an integer multiple of dt")

    @property
    def n_records(self) -> int:
        return int(round(self.T / self.interval))

    def field(self) -> QuenchedField:
        return QuenchedField(self.seed, self.d, self.distribution)


@dataclass
class SimState:
    t: float
    u: np.ndarray
    udot: np.ndarray


@dataclass(frozen=True)
class VelocityRecord:
    t: float
    mean_udot: float
    min_udot: float
    mean_u_over_t: float
    tracked_u_over_t: float
    # set on the final record only: (mean u(T) - mean u(T/2)) / (T - T/2)
    window_mean_velocity: float | None = None


def torus_coords(N: int, d: int) -> np.ndarray:
    """Coordinates of every torus site, shape ``(N,)*d + (d,)``."""
    grids = np.meshgrid(*([np.arange(N, dtype=np.int64)] * d), indexing="ij")
    return np.stack(grids, axis=-1)


class ObstacleTable:
    """Strengths ``s[i, n]`` for every torus site and heights ``0..max_height``."""

    def __init__(self, fld: QuenchedField, N: int, max_height: int):
        entries = N**fld.d * (max_height + 1)
        if entries > MAX_TABLE_ENTRIES:
            raise ValueError(
                f"obstacle table would hold {entries} entries (limit {MAX_TABLE_ENTRIES}); "
                "reduce N, F or T"
            )
        self.field = fld
        self.N = N
        self.max_height = max_height
        coords = torus_coords(N, fld.d)
        heights = np.arange(max_height + 1, dtype=np.int64)
        self.table = np.asarray(fld.strength(coords[..., None, :], heights))
        self.s_max = float(self.table.max())

    def force(self, u: np.ndarray, lo: int = 0, hi: int | None = None) -> np.ndarray:
        """Force on the rows ``lo:hi`` (first axis) of the height array ``u``."""
        n = np.floor(u + 0.5)
        idx = np.clip(n, 0, self.max_height).astype(np.int64)
        s = np.take_along_axis(self.table[lo:hi], idx[..., None], axis=-1)[..., 0]
        return s * bump(u - n)


class _FieldForce:
    """Force straight from the hash, for one-off evaluations without a table."""

    def __init__(self, fld: QuenchedField, N: int):
        self.field = fld
        self.coords = torus_coords(N, fld.d)

    def force(self, u: np.ndarray, lo: int = 0, hi: int | None = None) -> np.ndarray:
        return np.asarray(self.field.force(self.coords[lo:hi], u))


def max_stable_dt(d: int, s_max: float) -> float:
    return 0.9 / (4 * d + 8.0 * s_max)


def _rhs_rows(u: np.ndarray, lo: int, hi: int, F: float, forces) -> np.ndarray:
    N = u.shape[0]
    block = u[lo:hi]
    up = np.take(u, np.arange(lo + 1, hi + 1) % N, axis=0)
    down = np.take(u, np.arange(lo - 1, hi - 1) % N, axis=0)
    # sum of differences, so flat fields give an exact zero
    lap = (up - block) + (down - block)
    for a in range(1, u.ndim):
        lap = lap + (np.roll(block, 1, axis=a) - block) + (np.roll(block, -1, axis=a) - block)
    return lap - forces.force(block, lo, hi) + F


def _row_blocks(N: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(workers, N))
    edges = np.linspace(0, N, workers + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


def _evaluate(u, F, forces, pool: ThreadPoolExecutor | None, workers: int) -> np.ndarray:
    if pool is None or workers <= 1:
        return _rhs_rows(u, 0, u.shape[0], F, forces)
    parts = pool.map(lambda b: _rhs_rows(u, b[0], b[1], F, forces), _row_blocks(u.shape[0], workers))
    return np.concatenate(list(parts), axis=0)


def rhs(state: SimState, config: SimConfig, fld: QuenchedField, obstacles=None) -> np.ndarray:
    """Velocity field ``lap(u) - f(u) + F`` with periodic neighbours."""
    u = np.asarray(state.u, dtype=np.float64)
    if u.shape != (config.N,) * config.d:
        raise ValueError(f"state shape {u.shape} does not match a {config.d}-d torus of side {config.N}")
    forces = obstacles if obstacles is not None else _FieldForce(fld, config.N)
    return _rhs_rows(u, 0, config.N, config.F, forces)


def _blowup_check(udot, u, F, d, s_max):
    # |lap u| <= 4d max|u| always, so in practice this trips on overflow to inf/nan
    limit = 10.0 * (F + 4 * d * float(np.max(np.abs(u))) + s_max)
    worst = float(np.max(np.abs(udot)))
    if not np.isfinite(worst) or worst > limit:
        raise InstabilityError(f"|udot| reached {worst:.3e}, exceeding guard {limit:.3e}")


def step(state: SimState, config: SimConfig, fld: QuenchedField, dt: float | None = None,
         obstacles=None) -> SimState:
    """One explicit Euler step; the returned state carries its own velocities."""
    dt = config.dt if dt is None else dt
    if dt is None:
        raise ValueError("step needs a time step (config.dt or dt=...)")
    forces = obstacles if obstacles is not None else _FieldForce(fld, config.N)
    u = state.u + dt * state.udot
    if not np.all(np.isfinite(u)):
        raise InstabilityError("heights are no longer finite")
    udot = _rhs_rows(u, 0, config.N, config.F, forces)
    s_max = getattr(forces, "s_max", None)
    if s_max is None:
        s_max = float(np.max(np.asarray(fld.strength(
            torus_coords(config.N, config.d), np.floor(u + 0.5).astype(np.int64)))))
    _blowup_check(udot, u, config.F, config.d, s_max)
    return SimState(state.t + dt, u, udot)


def _schedule(config: SimConfig, s_max: float) -> tuple[float, int]:
    """Time step and number of steps per recording interval."""
    dt_max = max_stable_dt(config.d, s_max)
    if config.dt is None:
        per = max(1, math.ceil(config.interval / dt_max - 1e-12))
        return config.interval / per, per
    if config.dt > dt_max * (1 + 1e-12):
        raise ValueError(
            f"dt={config.dt} exceeds the stability limit {dt_max:.6g} for s_max={s_max:.6g}"
        )
    return config.dt, int(round(config.interval / config.dt))


def _record(state: SimState) -> VelocityRecord:
    u, v, t = state.u, state.udot, state.t
    origin = (0,) * u.ndim
    return VelocityRecord(
        t=t,
        mean_udot=float(np.mean(v)),
        min_udot=float(np.min(v)),
        mean_u_over_t=float(np.mean(u)) / t,
        tracked_u_over_t=float(u[origin]) / t,
    )


def integrate(
    config: SimConfig,
    fld: QuenchedField | None = None,
    initial: np.ndarray | None = None,
    workers: int = 1,
    observer: Callable[[SimState], None] | None = None,
) -> list[VelocityRecord]:
    """Run from t=0 to T, returning one record per recording interval.

    ``initial`` defaults to the flat zero interface; non-negative perturbed
    data are accepted for comparison experiments.  ``observer`` is called with
    the state at every recorded time.
    """
    fld = config.field() if fld is None else fld
    if fld.d != config.d:
        raise ValueError("field dimension does not match config")
    shape = (config.N,) * config.d
    u0 = np.zeros(shape) if initial is None else np.array(initial, dtype=np.float64)
    if u0.shape != shape:
        raise ValueError(f"initial data shape {u0.shape} != {shape}")
    if np.any(u0 < 0):
        raise ValueError("initial heights must be non-negative")

    max_height = math.ceil(config.F * config.T + float(u0.max())) + 1
    obstacles = ObstacleTable(fld, config.N, max_height)
    dt, per = _schedule(config, obstacles.s_max)
    total = per * config.n_records
    half = total // 2

    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        state = SimState(0.0, u0, _evaluate(u0, config.F, obstacles, pool, workers))
        records: list[VelocityRecord] = []
        mean_half = None
        n = 0
        for _ in range(config.n_records):
            for _ in range(per):
                u = state.u + dt * state.udot
                udot = _evaluate(u, config.F, obstacles, pool, workers)
                _blowup_check(udot, u, config.F, config.d, obstacles.s_max)
                n += 1
                state = SimState(n * dt, u, udot)
                if n == half:
                    mean_half = float(np.mean(u))
            records.append(_record(state))
            if observer is not None:
                observer(state)
    finally:
        if pool is not None:
            pool.shutdown()

    last = records[-1]
    t_half = half * dt
    window = (float(np.mean(state.u)) - mean_half) / (state.t - t_half) if half > 0 else last.mean_udot
    records[-1] = VelocityRecord(**{**last.__dict__, "window_mean_velocity": window})
    return records


@dataclass(frozen=True)
class VelocitySummary:
    mean: float
    min: float
    se: float
    half_width: float
    n: int


def velocity_statistics(runs: Sequence[Sequence[VelocityRecord]],
                        quantity: str = "mean_u_over_t") -> VelocitySummary:
    """Across-seed statistics of ``quantity`` taken from each run's final record.

    The half-width is three standard errors.
    """
    if not runs or any(len(r) == 0 for r in runs):
        raise ValueError("velocity_statistics needs at least one non-empty run")
    x = np.array([getattr(r[-1], quantity) for r in runs], dtype=np.float64)
    se = float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else 0.0
    return VelocitySummary(float(x.mean()), float(x.min()), se, 3.0 * se, len(x))
