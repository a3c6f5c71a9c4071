"""
Fourth-order gradient recovery from a nodal solution.

Along every grid line the derivative on the two end nodes comes from the
5-point one-sided formula, and the interior derivatives solve the compact
system ``(d[i-1] + 4 d[i] + d[i+1]) / 6 = (u[i+1] - u[i-1]) / (2h)``. Each
line is one tridiagonal system with identity rows at both ends; all lines
along an axis are solved together by the batched Thomas algorithm.
"""
from dataclasses import dataclass

import numpy as np

from excmg.grid import Field3
from excmg.solvers import thomas_solve

__all__ = ['GradientField', 'gradient_component', 'gradient',
           'ONE_SIDED_WEIGHTS']

ONE_SIDED_WEIGHTS = (-25/12, 4.0, -3.0, 4/3, -1/4)

_AXES = {'x': 0, 'y': 1, 'z': 2}


@dataclass
class GradientField:
    gx: Field3
    gy: Field3
    gz: Field3

    @property
    def components(self):
        return (self.gx, self.gy, self.gz)

    def __sub__(self, other):
        return GradientField(*(a - b for a, b in
                               zip(self.components, other.components)))


def gradient_component(u, axis):
    """Derivative of ``u`` along ``axis`` (``'x'``, ``'y'``, ``'z'`` or
    0, 1, 2) at every node."""
    axis = _AXES.get(axis, axis)
    if axis not in (0, 1, 2):
        raise ValueError(f"unknown axis {axis!r}")
    n = u.grid.counts[axis]
    if n < 4:
        raise ValueError(f"need at least 4 intervals along axis {axis}, "
                         f"got {n}")
    h = u.grid.spacing[axis]
    v = np.moveaxis(u.values, axis, 0)
    w = ONE_SIDED_WEIGHTS

    rhs = np.empty(v.shape)
    rhs[0] = sum(wk * v[k] for k, wk in enumerate(w)) / h
    rhs[-1] = -sum(wk * v[n - k] for k, wk in enumerate(w)) / h
    rhs[1:-1] = (v[2:] - v[:-2]) / (2*h)

    lower = np.full(n + 1, 1/6)
    upper = np.full(n + 1, 1/6)
    diag = np.full(n + 1, 4/6)
    lower[-1] = upper[0] = 0.0
    diag[0] = diag[-1] = 1.0

    d = thomas_solve(lower, diag, upper, rhs)
    return Field3(u.grid, np.moveaxis(d, 0, axis))


def gradient(u):
    """All three derivative components of ``u``."""
    return GradientField(*(gradient_component(u, ax) for ax in range(3)))
