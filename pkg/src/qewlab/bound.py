"""Lower bounds on the propagation velocity.

Both bounds maximise, over ``mu > lam``, the objective

    (lam * G - log(beta) - max(log(2 / (mu - lam)), log(2e))) / mu

for an effective integer force ``G``: ``G = floor(F) - 2d`` for the
continuous-time bound ``V`` and ``G = F`` for the lattice bound ``Vbar``.
Below ``mu = lam + 1/e`` the logarithmic branch of the max is active; above it
the constant branch.  Each branch is maximised separately by a coarse grid
followed by golden-section refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "BoundParams",
    "BoundResult",
    "objective",
    "maximize",
    "V",
    "Vbar",
    "V_detail",
    "Vbar_detail",
    "golden_section_max",
]

LOG_2E = math.log(2.0) + 1.0
CROSSOVER = 1.0 / math.e
BRACKET_LO = 1e-9
BRACKET_HI = 50.0
GRID_POINTS = 400
TOL = 1e-8

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class BoundParams:
    lam: float
    beta: float
    d: int
    F: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be > 0, got {self.lam}")
        if not self.beta >= 1:
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if not self.F >= 0:
            raise ValueError(f"driving force must be >= 0, got {self.F}")


@dataclass(frozen=True)
class BoundResult:
    value: float
    mu: float  # math.inf when the supremum is only approached as mu -> inf
    branch: str  # "log", "const" or "limit"


def objective(params: BoundParams, mu, effective_force: int):
    """Objective at ``mu``; accepts scalars or arrays of ``mu``."""
    lam = params.lam
    mu_arr = np.asarray(mu, dtype=np.float64)
    if np.any(mu_arr <= lam):
        raise ValueError(f"mu must exceed lambda={lam}")
    penalty = np.maximum(np.log(2.0 / (mu_arr - lam)), LOG_2E)
    out = (lam * effective_force - math.log(params.beta) - penalty) / mu_arr
    return float(out) if out.ndim == 0 else out


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float = TOL):
    """Maximise a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``.

    The returned point is the best of the final bracket and its end points.
    """
    lo, hi = a, b
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = f(x2)
    candidates = [(x1, f1), (x2, f2), (a, f(a)), (b, f(b))]
    return max(candidates, key=lambda p: p[1])


def _branch_max(g: Callable[[float], float], x_lo: float, x_hi: float):
    xs = np.geomspace(x_lo, x_hi, GRID_POINTS)
    vals = np.array([g(x) for x in xs])
    i = int(np.argmax(vals))
    a = float(xs[max(i - 1, 0)])
    b = float(xs[min(i + 1, len(xs) - 1)])
    return golden_section_max(g, a, b)


def maximize(params: BoundParams, effective_force: int) -> BoundResult:
    """Supremum over ``mu > lam`` of the objective, clamped below at zero."""
    lam = params.lam
    num = lam * effective_force - math.log(params.beta)

    def log_branch(x):
        return (num - math.log(2.0 / x)) / (lam + x)

    def const_branch(x):
        return (num - LOG_2E) / (lam + x)

    best = BoundResult(0.0, math.inf, "limit")
    for name, g, lo, hi in (
        ("log", log_branch, BRACKET_LO, CROSSOVER),
        ("const", const_branch, CROSSOVER, BRACKET_HI),
    ):
        x, val = _branch_max(g, lo, hi)
        if val > best.value:
            best = BoundResult(float(val), float(lam + x), name)
    return best


def V_detail(params: BoundParams) -> BoundResult:
    return maximize(params, math.floor(params.F) - 2 * params.d)


def V(params: BoundParams) -> float:
    """Velocity lower bound for the continuous-time lattice dynamics."""
    return V_detail(params).value


def Vbar_detail(params: BoundParams) -> BoundResult:
    if params.F != int(params.F):
        raise ValueError(f"Vbar needs an integer force, got {params.F}")
    return maximize(params, int(params.F))


def Vbar(params: BoundParams) -> float:
    """Average-velocity lower bound for integer admissible profiles."""
    return Vbar_detail(params).value
