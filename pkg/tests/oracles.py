"""Independent reference computations used by several test modules."""

import math

import numpy as np


def grid_bound(lam, beta, G, step=1e-4, span=50.0):
    """Brute-force sup of the velocity objective on a uniform mu grid, clamped at 0."""
    x = np.arange(step, span + step / 2, step)
    pen = np.maximum(np.log(2.0 / x), math.log(2.0) + 1.0)
    vals = (lam * G - math.log(beta) - pen) / (lam + x)
    i = int(np.argmax(vals))
    return max(0.0, float(vals[i])), lam + float(x[i])


def grid_V(lam, beta, d, F, **kw):
    return grid_bound(lam, beta, math.floor(F) - 2 * d, **kw)[0]


# --- plain-Python reference enumeration --------------------------------------

import itertools

from qewlab.lattice import Cube, HeightField, boundary_flux, laplacian


def brute_profiles(k, d, A, fbar, F):
    """Admissible profiles on Q_{k+1} by scanning every candidate.

    ``fbar(site, height)`` gives the integer obstacle; returns (values array,
    velocity sum on Q_k, flux) triples in lexicographic order.
    """
    outer = Cube(k + 1, d)
    inner = list(Cube(k, d).sites())
    out = []
    for vals in itertools.product(range(A + 1), repeat=len(outer)):
        arr = np.array(vals, dtype=np.int64).reshape(outer.shape)
        fld = HeightField.on_cube(arr, k + 1)
        vel = [laplacian(fld, i) - fbar(i, int(fld[i])) + F for i in inner]
        if min(vel) >= 0:
            out.append((arr, sum(vel), boundary_flux(fld, k)))
    return out


def brute_Y(k, d, A, fbar, F, lam, mu):
    return sum(math.exp(lam * flux - mu * v) for _, v, flux in brute_profiles(k, d, A, fbar, F))


def brute_extension_counts(k, d, A, fbar, F, w):
    """Counts by shell velocity of all value choices on Q_{k+2} \\ Q_{k+1} extending ``w``.

    Every extension is materialised as a full array on Q_{k+2}; Laplacians come
    from array slicing.
    """
    big = Cube(k + 2, d)
    mid = Cube(k + 1, d)
    outer = [s for s in big.sites() if s not in mid]
    ring = [s for s in mid.sites() if s not in Cube(k, d)]
    choices = np.array(list(itertools.product(range(A + 1), repeat=len(outer))), dtype=np.int64)
    arr = np.zeros((len(choices),) + big.shape, dtype=np.int64)
    inner = (slice(None),) + tuple(slice(1, -1) for _ in range(d))
    arr[inner] = w
    for col, s in enumerate(outer):
        arr[(slice(None),) + big.index(s)] = choices[:, col]
    total = np.zeros(len(choices), dtype=np.int64)
    ok = np.ones(len(choices), dtype=bool)
    for r in ring:
        idx = big.index(r)
        centre = arr[(slice(None),) + idx]
        lap = -2 * d * centre
        for a in range(d):
            for step in (1, -1):
                nb = list(idx)
                nb[a] += step
                lap = lap + arr[(slice(None),) + tuple(nb)]
        obstacle = np.array([fbar(r, int(h)) for h in range(A + 1)])[centre]
        v = lap - obstacle + F
        ok &= v >= 0
        total += v
    js, counts = np.unique(total[ok], return_counts=True)
    return {int(j): int(n) for j, n in zip(js, counts)}
