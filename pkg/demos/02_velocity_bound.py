"""
The velocity lower bound as a function of the driving force
===========================================================

The bound maximises a one-dimensional objective over mu > lambda.  Below
a force of about 2d + 1 it is zero; for large forces it approaches the
force itself up to a logarithmic correction.
"""

import math

from qewlab import BoundParams, V_detail, beta
from qewlab.disorder import ObstacleDistribution

lam = 1.0
b = beta(ObstacleDistribution.exponential(2.0), lam)  # equals e + 1
print(f"beta = {b:.6f} (e + 1 = {math.e + 1:.6f})")

print(f"{'F':>6} {'V(F)':>10} {'mu*':>8}  branch")
for F in (0, 2, 4, 6, 8, 10, 15, 20, 40, 100):
    r = V_detail(BoundParams(lam, b, 1, F))
    print(f"{F:>6} {r.value:>10.5f} {r.mu:>8.4f}  {r.branch}")

# The offset F - log(F)/lambda - V(F) settles to a constant.
for F in (100, 1000, 10_000):
    r = V_detail(BoundParams(lam, b, 1, F))
    print(f"F = {F:>6}: F - log F - V = {F - math.log(F) - r.value:.4f}")
