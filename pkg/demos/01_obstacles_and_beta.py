"""
Quenched obstacles and their exponential moment
===============================================

Every obstacle strength is a pure function of (seed, site, height), so the
same field can be queried from anywhere without storing it.
"""

import numpy as np

from qewlab import ObstacleDistribution, QuenchedField, beta, beta_mc

# One fixed realisation in one dimension with exponential strengths of rate 2.
law = ObstacleDistribution.exponential(2.0)
field = QuenchedField(seed=2024, d=1, distribution=law)

# Height 0 is always obstacle-free; other heights carry a random bump.
print("strengths at site 0, heights 0..6:",
      np.round(field.strength((0,), np.arange(7)), 3))

# The force profile along one site: a smooth bump centred on each integer.
ys = np.linspace(0.5, 3.5, 13)
print("force along y:", np.round(field.force((0,), ys), 3))

# The integer ceiling of each window supremum feeds the discrete analysis.
print("fbar at heights 1..6:", field.fbar((0,), np.arange(1, 7)))

# The closed-form moment against a Monte Carlo estimate for every law.
for dist in (ObstacleDistribution.zero(),
             ObstacleDistribution.constant(1.5),
             ObstacleDistribution.uniform(0.3, 2.6),
             law,
             ObstacleDistribution.bernoulli(0.5, 1.0)):
    est = beta_mc(QuenchedField(7, 1, dist), 1.0, 200_000)
    print(f"{dist.kind:>16}: closed form {beta(dist, 1.0):.5f}  "
          f"Monte Carlo {est.mean:.5f} +- {est.se:.5f}")
