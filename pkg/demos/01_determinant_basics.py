"""
The normalized determinant of a point configuration
====================================================

Build a configuration, look at the polynomial family attached to it and
evaluate the normalized determinant D.
"""

import numpy as np

from confpoly import Configuration, family, normalized_determinant
from confpoly.maps import assemble_matrix

# %%
# Two points always give D = 1, wherever they are.
two = Configuration("euclidean", [[0.0, 0.0, 0.0], [0.3, -1.2, 2.0]])
print("two points:", normalized_determinant(two, 1).value)

# %%
# Points on a line are the reference configuration, so D = 1 there too.
line = Configuration("euclidean", [[0, 0, z] for z in (0.0, 0.7, 1.1, 3.0)])
for d in (1, 2, 3):
    print(f"collinear, d={d}:", normalized_determinant(line, d).value)

# %%
# The regular tetrahedron.  For one observer (d=1) this is the classical
# value 25/16; the middle value d=2 comes out as 243/128.
tet = Configuration("euclidean", [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]])
for d in (1, 2, 3):
    rep = normalized_determinant(tet, d)
    print(f"tetrahedron, d={d}: D = {rep.value.real:.10f}  ({rep.wall_time * 1e3:.2f} ms)")

# %%
# The family itself: one degree-d polynomial in k+1 variables per d-subset,
# and the square matrix of their coefficients in the subset monomial basis.
fam = family(tet, 2)
for subset, poly in fam.members.items():
    print(subset, np.round(poly.coeffs, 3))
M = assemble_matrix(fam)
print("matrix shape:", M.shape)

# %%
# Star mode swaps the roles of observers and stars.
print("star mode, d=2:", normalized_determinant(tet, 2, "star").value)
