"""Simulation and exhaustive-verification toolkit for a driven elastic
interface on Z^d moving through quenched random obstacles."""

from .bound import BoundParams, BoundResult, V, Vbar, V_detail, Vbar_detail, objective
from .disorder import (
    ObstacleDistribution,
    QuenchedField,
    beta,
    beta_mc,
    bump,
    derive_seed,
    fbar,
    force,
    strength,
)
from .dynamics import (
    SimConfig,
    SimState,
    VelocityRecord,
    integrate,
    rhs,
    step,
    velocity_statistics,
)
from .lattice import (
    Cube,
    HeightField,
    boundary_flux,
    c,
    composition_tail_bound,
    compositions,
    laplacian,
    xi,
)
from .oracle import (
    BudgetExceeded,
    DiscreteProfile,
    FrozenDisorder,
    Y_k,
    count_extensions_by_velocity,
    enumerate_Pk,
    gamma_k_mc,
    is_admissible,
    min_avg_velocity,
    round_and_check,
    supermartingale_check,
)

__version__ = "0.1.0"
