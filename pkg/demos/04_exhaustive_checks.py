"""
Exhaustive checks on small cubes
================================

Integer profiles on a small cube are admissible when their discrete
velocity is non-negative inside.  Enumerating them exactly lets us evaluate
the weighted sum Y_k, compare the conditional expectation of the next sum
with its growth-factor bound, and count shell extensions by velocity.
"""

from qewlab import FrozenDisorder, QuenchedField, Y_k, enumerate_Pk, supermartingale_check
from qewlab.disorder import ObstacleDistribution
from qewlab.lattice import c, compositions
from qewlab.oracle import extension_velocity_counts

law = ObstacleDistribution.exponential(2.0)
field = QuenchedField(3, 1, law)
k, d, A, F = 1, 1, 3, 2

dis = FrozenDisorder.from_field(field, k + 1, A)
P = enumerate_Pk(k, d, A, dis, F)
print(f"{P.count} admissible profiles on Q_{k + 1} with heights up to {A}")

Y = Y_k(k, d, A, dis, F, lam=1.0, mu=2.0)
print(f"Y = {Y.value:.6e}; flux and Laplacian forms differ by {Y.rel_diff:.1e}")

# Freeze the inner obstacles and resample the next shell.
inner = FrozenDisorder.from_field(field, k, A)
r = supermartingale_check(k, d, A, inner, F, 1.0, 2.0, resamples=5000, distribution=law, seed=1)
print(f"E(next Y) = {r.lhs:.4e}  gamma * Y = {r.gamma * r.Y:.4e}  margin = {r.margin:.3e}")

# In one dimension no outer site is free, so counts never exceed j + 1.
M = extension_velocity_counts(k, d, A, dis, F, P.values)
print("largest count per shell velocity j:", M.max(axis=0).tolist())
print("bound compositions(c, j):          ", [compositions(c(k, d), j) for j in range(M.shape[1])])
