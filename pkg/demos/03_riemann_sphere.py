"""
Points on the Riemann sphere
============================

When the points sit on CP^1 the lifts are attached to points instead of
pairs.  The family then pairs with a set of dual points in a diagonal
pattern, which proves the family is linearly independent.
"""

import numpy as np

from confpoly import Configuration
from confpoly.maps import assemble_matrix, cp1_pairing_matrix, determinant, family

z = np.array([0.0, 1.0 + 0.5j, -2.0j, complex(np.inf, 0), 0.4 - 0.9j])
cfg = Configuration("cp1", z)

# %%
# The pairing matrix against the dual points is diagonal.
P = cp1_pairing_matrix(cfg, 2, "observer")
off = np.abs(P - np.diag(np.diag(P))).max()
print("largest off-diagonal entry:", off)
print("diagonal magnitudes:", np.round(np.abs(np.diag(P)), 4))

# %%
# So the coefficient matrix has full rank.
M = assemble_matrix(family(cfg, 2, "observer"))
print("rank", np.linalg.matrix_rank(M), "of", M.shape[0])

# %%
# The normalized determinant does not move as the points move: for five
# points and d=2 it is 64 in observer mode and 3^10 in star mode.
rng = np.random.default_rng(3)
for _ in range(3):
    w = rng.normal(size=5) + 1j * rng.normal(size=5)
    c = Configuration("cp1", w)
    print(determinant(c, 2, "observer").real, determinant(c, 2, "star").real)
