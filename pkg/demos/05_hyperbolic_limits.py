"""
Hyperbolic configurations and their two limits
==============================================

Shrinking a hyperbolic configuration towards the centre of the ball recovers
the Euclidean value; pushing it out to the boundary sphere recovers the
Riemann-sphere value.
"""

import numpy as np

from confpoly import Configuration
from confpoly.maps import determinant
from confpoly.verify import boundary_points, euclidean_limit_errors, observed_orders

rng = np.random.default_rng(5)
x = rng.normal(size=(4, 3))

# %%
# Small configurations: errors shrink linearly with the scale.
eps = (1e-2, 1e-3, 1e-4)
t_err, d_err = euclidean_limit_errors(x, 2, eps=eps)
print("direction errors:", t_err)
print("determinant errors:", d_err)
print("observed orders:", observed_orders(d_err, eps))

# %%
# Large configurations: points along fixed boundary directions.
cfg = Configuration("cp1", rng.normal(size=4) + 1j * rng.normal(size=4))
print("sphere value:", determinant(cfg, 2).real)
for r in (0.9, 0.99, 0.999, 0.9999):
    print(r, determinant(boundary_points(cfg, r), 2).real)
