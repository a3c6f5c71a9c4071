"""
Matrix-free 19-point fourth-order compact operator and its right-hand side.

The compact scheme for ``u_xx + u_yy + u_zz = f`` is negated here so that the
interior operator is symmetric positive definite::

    (A u)_c = 8(a+b+c) u_c - (4a-b-c)(u_e + u_w) - (4b-a-c)(u_n + u_s)
              - (4c-a-b)(u_t + u_b) - (a+b)/2 (four xy-diagonals)
              - (a+c)/2 (four xz-diagonals) - (b+c)/2 (four yz-diagonals)

    rhs_c   = -(6 f_c + sum of the six axis neighbours of f) / 2

with ``a = 1/hx**2``, ``b = 1/hy**2``, ``c = 1/hz**2``. Dirichlet data is
eliminated into the right-hand side, so solvers work on interior unknowns
with a zero boundary shell.
"""
from dataclasses import dataclass

import numba as nb
import numpy as np
import scipy.sparse as sp

from excmg.grid import Field3, zeros, apply_dirichlet

__all__ = ['OperatorCoefficients', 'apply_operator', 'apply_interior',
           'assemble_rhs', 'residual', 'diagonal_coefficient',
           'assemble_matrix']


@dataclass(frozen=True)
class OperatorCoefficients:
    """Weights of the positive-definite 19-point operator on one grid."""
    a: float
    b: float
    c: float

    @classmethod
    def from_grid(cls, grid):
        return cls(1/grid.hx**2, 1/grid.hy**2, 1/grid.hz**2)

    @property
    def center(self):
        return 8*(self.a + self.b + self.c)

    @property
    def axis(self):
        """Couplings to the x-, y- and z-neighbour pairs (as on the left
        side of the original scheme; the operator uses their negatives)."""
        a, b, c = self.a, self.b, self.c
        return (4*a - b - c, 4*b - a - c, 4*c - a - b)

    @property
    def edge(self):
        """Couplings to the xy-, xz- and yz-diagonal quadruples."""
        a, b, c = self.a, self.b, self.c
        return ((a + b)/2, (a + c)/2, (b + c)/2)

    def weight_sum(self):
        return -self.center + 2*sum(self.axis) + 4*sum(self.edge)


_jit = {'nogil': True, 'cache': True}


@nb.njit(inline='always', cache=True)
def _point(u, i, j, k, wx, wy, wz, exy, exz, eyz):
    # Written in difference form: the weights sum to zero, and differencing
    # against the centre keeps the cancellation error O(h) smaller.
    uc = u[i, j, k]
    sx = (u[i+1, j, k] - uc) + (u[i-1, j, k] - uc)
    sy = (u[i, j+1, k] - uc) + (u[i, j-1, k] - uc)
    sz = (u[i, j, k+1] - uc) + (u[i, j, k-1] - uc)
    dxy = ((u[i+1, j+1, k] - uc) + (u[i+1, j-1, k] - uc)
           + (u[i-1, j+1, k] - uc) + (u[i-1, j-1, k] - uc))
    dxz = ((u[i+1, j, k+1] - uc) + (u[i+1, j, k-1] - uc)
           + (u[i-1, j, k+1] - uc) + (u[i-1, j, k-1] - uc))
    dyz = ((u[i, j+1, k+1] - uc) + (u[i, j-1, k+1] - uc)
           + (u[i, j+1, k-1] - uc) + (u[i, j-1, k-1] - uc))
    return -(wx*sx + wy*sy + wz*sz + exy*dxy + exz*dxz + eyz*dyz)


@nb.njit(**_jit)
def _stencil(u, out, wx, wy, wz, exy, exz, eyz):
    n0, n1, n2 = u.shape
    for k in range(1, n2 - 1):
        for j in range(1, n1 - 1):
            for i in range(1, n0 - 1):
                out[i, j, k] = _point(u, i, j, k, wx, wy, wz, exy, exz, eyz)


@nb.njit(inline='always', cache=True)
def _line_dot(x, y, k, j, lo, hi):
    # four interleaved partial sums: fixed order, but not one serial chain
    s0 = s1 = s2 = s3 = 0.0
    i = lo
    while i + 3 < hi:
        s0 += x[i, j, k] * y[i, j, k]
        s1 += x[i+1, j, k] * y[i+1, j, k]
        s2 += x[i+2, j, k] * y[i+2, j, k]
        s3 += x[i+3, j, k] * y[i+3, j, k]
        i += 4
    while i < hi:
        s0 += x[i, j, k] * y[i, j, k]
        i += 1
    return (s0 + s1) + (s2 + s3)


@nb.njit(**_jit)
def _rhs_kernel(f, out):
    n0, n1, n2 = f.shape
    for k in range(1, n2 - 1):
        for j in range(1, n1 - 1):
            for i in range(1, n0 - 1):
                out[i, j, k] = -0.5*(6.0*f[i, j, k]
                                     + f[i+1, j, k] + f[i-1, j, k]
                                     + f[i, j+1, k] + f[i, j-1, k]
                                     + f[i, j, k+1] + f[i, j, k-1])


def _weights(grid):
    co = OperatorCoefficients.from_grid(grid)
    return co.axis + co.edge


def _check_grid(grid):
    if min(grid.counts) < 2:
        raise ValueError(f"grid {grid} needs at least 2 intervals per axis")


def apply_operator(u):
    """Apply the operator at interior nodes, reading boundary values of ``u``.

    The output is zero on the boundary shell.
    """
    _check_grid(u.grid)
    out = zeros(u.grid)
    _stencil(u.values, out, *_weights(u.grid))
    return Field3(u.grid, out)


def apply_interior(values, grid, out=None):
    """Operator on a raw node array whose boundary shell is zero.

    Low-level entry used by the iterative solvers; no copies are made, so
    the caller guarantees the zero boundary.
    """
    if out is None:
        out = zeros(grid)
    _stencil(values, out, *_weights(grid))
    return out


def assemble_rhs(f, g, grid=None):
    """Right-hand side of the eliminated interior system.

    Parameters
    ----------
    f : Field3
        Forcing sampled at every node, including the boundary.
    g : callable or Field3
        Dirichlet data, either a function ``g(x, y, z)`` or a field whose
        boundary values are used.
    grid : Grid3, optional
        Must match ``f.grid`` when given.

    Returns
    -------
    Field3
        Interior values ``-(6 f_c + sum f_nb)/2`` minus the coupling of the
        operator to the known boundary values; zero boundary shell.
    """
    grid = f.grid if grid is None else grid
    if f.grid != grid:
        raise ValueError(f"forcing lives on {f.grid}, expected {grid}")
    _check_grid(grid)
    out = zeros(grid)
    _rhs_kernel(f.values, out)

    if isinstance(g, Field3):
        shell = g.copy()
        shell.values[1:-1, 1:-1, 1:-1] = 0.0
    else:
        shell = apply_dirichlet(Field3.zeros(grid), g)
    out -= apply_operator(shell).values
    return Field3(grid, out)


def residual(u, rhs):
    """``rhs - A u`` on the interior, boundary entries zero.

    Boundary values of ``u`` are ignored: they are Dirichlet data already
    folded into ``rhs`` by :func:`assemble_rhs`.
    """
    if u.grid != rhs.grid:
        raise ValueError(f"grid mismatch: {u.grid} vs {rhs.grid}")
    au = apply_operator(u.with_zero_boundary())
    r = rhs.values - au.values
    r[0, :, :] = r[-1, :, :] = 0.0
    r[:, 0, :] = r[:, -1, :] = 0.0
    r[:, :, 0] = r[:, :, -1] = 0.0
    return Field3(u.grid, r)


def diagonal_coefficient(grid):
    """Constant diagonal entry ``8(1/hx**2 + 1/hy**2 + 1/hz**2)``."""
    return OperatorCoefficients.from_grid(grid).center


def assemble_matrix(grid):
    """Explicit sparse interior matrix in linear-index (x-fastest) order.

    Built from Kronecker products of 1D neighbour-sum matrices, which is
    independent of the matrix-free kernel.
    """
    mx, my, mz = (n - 1 for n in grid.counts)
    wx, wy, wz, exy, exz, eyz = _weights(grid)

    def shift(m):
        return sp.diags([np.ones(m - 1), np.ones(m - 1)], [-1, 1],
                        shape=(m, m), format='csr')

    Ix, Iy, Iz = (sp.identity(m, format='csr') for m in (mx, my, mz))
    Kx = sp.kron(Iz, sp.kron(Iy, shift(mx)))
    Ky = sp.kron(Iz, sp.kron(shift(my), Ix))
    Kz = sp.kron(shift(mz), sp.kron(Iy, Ix))
    eye = sp.identity(mx*my*mz, format='csr')

    A = -(wx*(Kx - 2*eye) + wy*(Ky - 2*eye) + wz*(Kz - 2*eye)
          + exy*(Kx @ Ky - 4*eye) + exz*(Kx @ Kz - 4*eye)
          + eyz*(Ky @ Kz - 4*eye))
    return A.tocsc()
