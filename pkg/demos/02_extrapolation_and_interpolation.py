"""
Richardson extrapolation and tri-quartic interpolation
======================================================

The two ingredients of the EXCMG prolongation. Pointwise extrapolation
formulas remove an ``h^4`` error, and a precomputed 604 x 125 table fills
the nodes of a fine-grid interpolation cell from 125 known values.
"""
from fractions import Fraction

import numpy as np

from excmg import InterpolationCell, triquartic_fill
from excmg.excmg import (extrapolate_corner, extrapolate_midpoint,
                         interpolation_table, quarter_point_weights)

# %%
# Model pointwise error e(h) = h^4. At a coarse-grid node the coarse
# solutions on h and 2h differ by 15 h^4; extrapolation predicts the error
# one grid finer, (h/2)^4.
h = Fraction(1)
print('corner  :', extrapolate_corner(h**4 / 16, h**4))
print('midpoint:', extrapolate_midpoint(h**4 / 16, h**4 / 16, h**4,
                                        h**4 / 16, h**4))

# %%
# One-dimensional quarter-point weights (over 128) on five equally spaced
# nodes. They reproduce quartics exactly.
rows = quarter_point_weights()
for t, w in zip(('1/4', '3/4', '5/4', '7/4'), rows):
    print(t, w, 'sum', sum(w))
xi = np.array([0, 0.5, 1, 1.5, 2])
print('xi^4 at 1/4:', np.dot(rows[0], xi**4) / 128, 'exact', 0.25**4)

# %%
# The tensor-product table: 604 targets, each a combination of the 125
# known nodes of the cell. Every row sums to one.
T = interpolation_table()
print('table', T.shape, 'row sums in [%.15f, %.15f]'
      % (T.sum(1).min(), T.sum(1).max()))
cell = InterpolationCell((0, 0, 0))
print('source classes (corner, edge, face, centre):', cell.source_classes())

# %%
# Tri-quartic data is reproduced exactly.
def q(x, y, z):
    return x**4 * y**3 * z**2 - 3*x*y + 1

h = 1 / 16
src = q(*(cell.source_nodes * h).T)
tgt = q(*(cell.target_nodes * h).T)
print('max interpolation error %.2e' % np.abs(triquartic_fill(cell, src)
                                              - tgt).max())
