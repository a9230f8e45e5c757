"""Cube geometry on Z^d, the nearest-neighbour Laplacian and shell counting.

Cube-domain fields are stored as arrays of shape ``(2R-1,)*d`` holding the
values on ``Q_R = {-R+1, ..., R-1}^d``; site ``i`` lives at array index
``i + R - 1``.  Torus fields are arrays of shape ``(N,)*d`` with periodic
indexing.  Integer arrays stay integer throughout, so identities between
integer fields are exact.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from dataclasses import dataclass
from typing import Iterator

import numpy as np

__all__ = [
    "Cube",
    "HeightField",
    "laplacian",
    "laplacian_array",
    "boundary_flux",
    "c",
    "xi",
    "compositions",
    "composition_tail_bound",
    "cube_sites",
    "neighbor_offsets",
]


def neighbor_offsets(d: int) -> np.ndarray:
    """The 2d unit vectors +-e_a, ordered (+e_0, -e_0, +e_1, -e_1, ...)."""
    out = np.zeros((2 * d, d), dtype=np.int64)
    for a in range(d):
        out[2 * a, a] = 1
        out[2 * a + 1, a] = -1
    return out


def cube_sites(k: int, d: int) -> np.ndarray:
    """Sites of Q_k as an ``(|Q_k|, d)`` array in lexicographic order."""
    if k < 1 or d < 1:
        raise ValueError("need k >= 1 and d >= 1")
    r = np.arange(-k + 1, k, dtype=np.int64)
    grids = np.meshgrid(*([r] * d), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


@dataclass(frozen=True)
class Cube:
    """The cube Q_k = {-k+1, ..., k-1}^d."""

    k: int
    d: int

    def __post_init__(self):
        if self.k < 1 or self.d < 1:
            raise ValueError("Cube needs k >= 1 and d >= 1")

    @property
    def side(self) -> int:
        return 2 * self.k - 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.side,) * self.d

    def __len__(self) -> int:
        return self.side**self.d

    def __contains__(self, site) -> bool:
        return len(site) == self.d and all(abs(int(x)) <= self.k - 1 for x in site)

    def sites(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(range(-self.k + 1, self.k), repeat=self.d)

    def ring(self) -> list[tuple[int, ...]]:
        """Sites of Q_{k+1} \\ Q_k."""
        outer = Cube(self.k + 1, self.d)
        return [s for s in outer.sites() if s not in self]

    def index(self, site) -> tuple[int, ...]:
        return tuple(int(x) + self.k - 1 for x in site)


@dataclass
class HeightField:
    """Values on either a cube ``Q_R`` or a periodic torus of side N.

    For a cube domain ``values.shape == Cube(R, d).shape``.
    """

    values: np.ndarray
    domain: Cube | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.domain is not None and self.values.shape != self.domain.shape:
            raise ValueError(
                f"values shape {self.values.shape} does not match cube shape {self.domain.shape}"
            )
        if self.domain is None and len(set(self.values.shape)) > 1:
            raise ValueError("torus fields must have equal side lengths")

    @classmethod
    def on_cube(cls, values, k: int) -> "HeightField":
        values = np.asarray(values)
        return cls(values, Cube(k, values.ndim))

    @classmethod
    def torus(cls, values) -> "HeightField":
        return cls(np.asarray(values), None)

    @property
    def d(self) -> int:
        return self.values.ndim

    @property
    def periodic(self) -> bool:
        return self.domain is None

    def __getitem__(self, site):
        if self.periodic:
            n = self.values.shape[0]
            return self.values[tuple(int(x) % n for x in site)]
        if site not in self.domain:
            raise IndexError(f"site {tuple(site)} outside stored cube Q_{self.domain.k}")
        return self.values[self.domain.index(site)]


def laplacian(field: HeightField, site) -> float | int:
    """Sum of nearest-neighbour differences at ``site``.

    On a cube domain every neighbour must be stored, i.e. ``site`` must lie
    in the interior cube Q_{R-1}.
    """
    site = tuple(int(x) for x in site)
    if len(site) != field.d:
        raise ValueError(f"site {site} has wrong dimension for a {field.d}-d field")
    if not field.periodic and not all(abs(x) <= field.domain.k - 2 for x in site):
        raise IndexError(
            f"site {site} has a neighbour outside the stored cube Q_{field.domain.k}"
        )
    centre = field[site]
    total = 0
    for e in neighbor_offsets(field.d):
        total = total + (field[tuple(np.add(site, e))] - centre)
    return total


def laplacian_array(u: np.ndarray) -> np.ndarray:
    """Periodic Laplacian of a whole torus array."""
    out = np.zeros_like(u)
    for a in range(u.ndim):
        out = out + (np.roll(u, 1, axis=a) - u) + (np.roll(u, -1, axis=a) - u)
    return out


def boundary_flux(field: HeightField, k: int):
    """Sum of ``w_r - w_i`` over neighbour pairs with ``i`` in Q_k and ``r`` outside."""
    if field.periodic:
        raise ValueError("boundary_flux needs a cube-domain field")
    if k < 1 or field.domain.k < k + 1:
        raise ValueError(f"field on Q_{field.domain.k} is too small for radius {k}")
    v = field.values
    off = field.domain.k - 1
    lo, hi = off - (k - 1), off + (k - 1)
    inner = tuple(slice(lo, hi + 1) for _ in range(field.d))
    total = 0
    for a in range(field.d):
        for face, step in ((hi, 1), (lo, -1)):
            i_sl = list(inner)
            r_sl = list(inner)
            i_sl[a] = face
            r_sl[a] = face + step
            total = total + (v[tuple(r_sl)] - v[tuple(i_sl)]).sum()
    return total.item() if isinstance(total, np.generic) else total


def _check_kd(k: int, d: int) -> None:
    if k < 1 or d < 1:
        raise ValueError(f"need k >= 1 and d >= 1, got k={k}, d={d}")


def c(k: int, d: int) -> int:
    """Number of sites in the shell Q_{k+1} \\ Q_k."""
    _check_kd(k, d)
    return (2 * k + 1) ** d - (2 * k - 1) ** d


def xi(k: int, d: int) -> int:
    """Growth of the shell size from k to k+1; zero in one dimension."""
    return c(k + 1, d) - c(k, d)


def compositions(m: int, j: int) -> int:
    """Number of ordered ways to write j as a sum of m non-negative integers."""
    if m < 1 or j < 0:
        raise ValueError(f"need m >= 1 and j >= 0, got m={m}, j={j}")
    return math.comb(j + m - 1, m - 1)


def composition_tail_bound(m: int, j: int) -> Fraction:
    """Polynomial upper bound ``2^(m-2)/(m-1)! * (j^(m-1) + (m-1)^(m-1))`` on compositions(m, j).

    Exact rational; meaningful for ``m >= 2``.
    """
    if m < 2 or j < 0:
        raise ValueError(f"need m >= 2 and j >= 0, got m={m}, j={j}")
    return Fraction(2 ** (m - 2), math.factorial(m - 1)) * (j ** (m - 1) + (m - 1) ** (m - 1))
