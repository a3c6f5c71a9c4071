"""
Linear solvers for the eliminated interior system: conjugate gradients with
a true-residual stopping test, lexicographic Gauss-Seidel, the Thomas
algorithm for (batched) tridiagonal systems and the coarse direct solver.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numba as nb
import numpy as np
import scipy.sparse.linalg as ssl

from excmg.grid import Field3, zeros
from excmg.stencil import (OperatorCoefficients, apply_interior,
                           assemble_matrix, _line_dot, _point, _weights)

__all__ = ['CgOutcome', 'cg_solve', 'gauss_seidel_sweep', 'thomas_solve',
           'direct_solve_coarse', 'DIRECT_SOLVE_CAP']

DIRECT_SOLVE_CAP = 31**3


@dataclass
class CgOutcome:
    """Result of :func:`cg_solve`.

    ``residual_history[m]`` is ``||rhs - A u_m|| / ||rhs||`` for the iterate
    after ``m`` steps, with entry 0 belonging to the initial guess.
    """
    solution: Field3
    iterations: int
    residual_history: list = field(default_factory=list)
    converged: bool = False


def _interior_copy(values):
    out = np.zeros_like(values, order='F')
    out[1:-1, 1:-1, 1:-1] = values[1:-1, 1:-1, 1:-1]
    return out


def _dot(x, y):
    # ravel(order='K') is a view for the Fortran-ordered node arrays
    return float(np.dot(x.ravel(order='K'), y.ravel(order='K')))


# The two CG sweeps below fuse the vector updates into the stencil passes.
# Plane k+1 is updated before the stencil is evaluated on plane k, which only
# reads planes k-1..k+1, so each sweep touches memory once. All sums are
# taken line by line in a fixed order.

@nb.njit(inline='always', cache=True)
def _line_dot2(p, line, k, j, n0):
    s0 = s1 = s2 = s3 = 0.0
    i = 1
    while i + 3 < n0 - 1:
        s0 += p[i, j, k] * line[i, 0, 0]
        s1 += p[i+1, j, k] * line[i+1, 0, 0]
        s2 += p[i+2, j, k] * line[i+2, 0, 0]
        s3 += p[i+3, j, k] * line[i+3, 0, 0]
        i += 4
    while i < n0 - 1:
        s0 += p[i, j, k] * line[i, 0, 0]
        i += 1
    return (s0 + s1) + (s2 + s3)


@nb.njit(nogil=True, cache=True)
def _direction_sweep(p, r, beta, wx, wy, wz, exy, exz, eyz):
    # p = r + beta p; returns p . A p (A p itself is not stored)
    n0, n1, n2 = p.shape
    line = np.empty((n0, 1, 1))
    for k in range(2):
        for j in range(n1):
            for i in range(n0):
                p[i, j, k] = r[i, j, k] + beta * p[i, j, k]
    acc = 0.0
    for k in range(1, n2 - 1):
        for j in range(n1):
            for i in range(n0):
                p[i, j, k+1] = r[i, j, k+1] + beta * p[i, j, k+1]
        for j in range(1, n1 - 1):
            for i in range(1, n0 - 1):
                line[i, 0, 0] = _point(p, i, j, k, wx, wy, wz, exy, exz, eyz)
            acc += _line_dot2(p, line, k, j, n0)
    return acc


@nb.njit(nogil=True, cache=True)
def _update_sweep(x, r, p, b, alpha, wx, wy, wz, exy, exz, eyz):
    # x += alpha p; r = b - A x from scratch; returns r . r
    n0, n1, n2 = x.shape
    rr = 0.0
    for k in range(1, n2):
        if k < n2 - 1:
            for j in range(1, n1 - 1):
                for i in range(1, n0 - 1):
                    x[i, j, k] += alpha * p[i, j, k]
        kk = k - 1
        if kk >= 1:
            for j in range(1, n1 - 1):
                for i in range(1, n0 - 1):
                    r[i, j, kk] = b[i, j, kk] - _point(x, i, j, kk, wx, wy,
                                                       wz, exy, exz, eyz)
                rr += _line_dot(r, r, kk, j, 1, n0 - 1)
    return rr


def cg_iterate(b, x, grid, eps=0.0, max_iters=1, check_tolerance=True):
    """Unpreconditioned CG on raw node arrays with zero boundary shells.

    ``x`` is updated in place. The residual ``b - A x`` is recomputed from
    scratch after every step (no recurrence) and used both for the next
    direction and for the stopping test ``||b - A x|| <= eps ||b||``. With
    ``check_tolerance=False`` exactly ``max_iters`` steps are taken
    (smoother mode).

    Returns ``(iterations, history, converged)``.
    """
    bnorm = np.sqrt(_dot(b, b))
    if bnorm == 0.0:
        x[...] = 0.0
        return 0, [0.0], True

    r = b - apply_interior(x, grid)
    rr = _dot(r, r)
    history = [np.sqrt(rr) / bnorm]
    if check_tolerance and history[0] <= eps:
        return 0, history, True

    w = _weights(grid)
    p = zeros(grid)
    beta = 0.0
    it = 0
    converged = False
    while it < max_iters:
        it += 1
        pq = _direction_sweep(p, r, beta, *w)
        if pq <= 0.0:
            # exact solution reached (p = 0) or loss of positivity
            break
        rr_new = _update_sweep(x, r, p, b, rr / pq, *w)
        history.append(np.sqrt(rr_new) / bnorm)
        if check_tolerance and history[-1] <= eps:
            converged = True
            break
        if rr_new == 0.0:
            converged = True
            break
        beta = rr_new / rr
        rr = rr_new
    return it, history, converged


def cg_solve(rhs, u0, eps, max_iters=None):
    """Solve ``A u = rhs`` on the interior by conjugate gradients.

    Parameters
    ----------
    rhs : Field3
        Eliminated right-hand side (see :func:`excmg.stencil.assemble_rhs`).
    u0 : Field3
        Initial guess. Its boundary values are carried over untouched.
    eps : float
        Relative residual tolerance, ``||rhs - A u|| <= eps ||rhs||``.
    max_iters : int, optional
        Defaults to ten times the largest interval count.

    Returns
    -------
    CgOutcome
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if rhs.grid != u0.grid:
        raise ValueError(f"grid mismatch: {rhs.grid} vs {u0.grid}")
    grid = rhs.grid
    if max_iters is None:
        max_iters = 10 * max(grid.counts)

    b = _interior_copy(rhs.values)
    x = _interior_copy(u0.values)
    iters, history, converged = cg_iterate(b, x, grid, eps, max_iters)

    solution = u0.copy()
    solution.values[1:-1, 1:-1, 1:-1] = x[1:-1, 1:-1, 1:-1]
    return CgOutcome(solution, iters, history, converged)


@nb.njit(nogil=True, cache=True)
def _gs_kernel(u, f, diag, wx, wy, wz, exy, exz, eyz, sweeps):
    n0, n1, n2 = u.shape
    for _ in range(sweeps):
        for k in range(1, n2 - 1):
            for j in range(1, n1 - 1):
                for i in range(1, n0 - 1):
                    s = (wx*(u[i+1, j, k] + u[i-1, j, k])
                         + wy*(u[i, j+1, k] + u[i, j-1, k])
                         + wz*(u[i, j, k+1] + u[i, j, k-1])
                         + exy*(u[i+1, j+1, k] + u[i+1, j-1, k]
                                + u[i-1, j+1, k] + u[i-1, j-1, k])
                         + exz*(u[i+1, j, k+1] + u[i+1, j, k-1]
                                + u[i-1, j, k+1] + u[i-1, j, k-1])
                         + eyz*(u[i, j+1, k+1] + u[i, j-1, k+1]
                                + u[i, j+1, k-1] + u[i, j-1, k-1]))
                    u[i, j, k] = (f[i, j, k] + s) / diag


def gauss_seidel_inplace(values, rhs_values, grid, sweeps=1):
    """Lexicographic sweeps on a raw node array with zero boundary shell."""
    co = OperatorCoefficients.from_grid(grid)
    _gs_kernel(values, rhs_values, co.center, *co.axis, *co.edge, sweeps)
    return values


def gauss_seidel_sweep(u, rhs):
    """One forward lexicographic Gauss-Seidel sweep (i fastest, then j, k).

    Boundary values of ``u`` are treated as eliminated (zero) during the
    sweep and restored afterwards.
    """
    if u.grid != rhs.grid:
        raise ValueError(f"grid mismatch: {u.grid} vs {rhs.grid}")
    work = _interior_copy(u.values)
    gauss_seidel_inplace(work, rhs.values, u.grid)
    out = u.copy()
    out.values[1:-1, 1:-1, 1:-1] = work[1:-1, 1:-1, 1:-1]
    return out


def thomas_solve(lower, diag, upper, rhs):
    """Solve a tridiagonal system by forward elimination and back
    substitution.

    Row ``i`` reads ``lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] =
    rhs[i]``. ``lower`` and ``upper`` may have length ``n`` (``lower[0]`` and
    ``upper[-1]`` are ignored) or ``n - 1`` (pure sub-/super-diagonals).

    ``rhs`` may carry trailing batch axes, ``rhs.shape == (n, ...)``; the
    coefficient arrays then broadcast against them, so many lines are solved
    at once.

    Raises
    ------
    numpy.linalg.LinAlgError
        If a zero pivot is met.
    """
    d = np.array(rhs, dtype=np.float64)
    n = d.shape[0]
    b = np.array(diag, dtype=np.float64)
    a = np.asarray(lower, dtype=np.float64)
    c = np.asarray(upper, dtype=np.float64)
    if b.shape[0] != n:
        raise ValueError("diagonal and rhs lengths differ")
    if a.shape[0] == n - 1:
        a = np.concatenate([np.zeros((1,) + a.shape[1:]), a])
    if c.shape[0] == n - 1:
        c = np.concatenate([c, np.zeros((1,) + c.shape[1:])])
    if a.shape[0] != n or c.shape[0] != n:
        raise ValueError("off-diagonal lengths inconsistent with rhs")

    b = np.broadcast_to(b.reshape(b.shape + (1,)*(d.ndim - b.ndim)),
                        d.shape).copy()
    a = a.reshape(a.shape + (1,)*(d.ndim - a.ndim))
    c = c.reshape(c.shape + (1,)*(d.ndim - c.ndim))

    for i in range(n):
        if i > 0:
            m = a[i] / b[i-1]
            b[i] = b[i] - m*c[i-1]
            d[i] = d[i] - m*d[i-1]
        if np.any(b[i] == 0.0):
            raise np.linalg.LinAlgError(f"zero pivot in row {i}")

    d[n-1] = d[n-1] / b[n-1]
    for i in range(n - 2, -1, -1):
        d[i] = (d[i] - c[i]*d[i+1]) / b[i]
    return d


@lru_cache(maxsize=16)
def _factorized(grid):
    return ssl.splu(assemble_matrix(grid))


def direct_solve_coarse(rhs, grid=None, cap=DIRECT_SOLVE_CAP):
    """Direct sparse LU solve of the interior system (zero boundary shell).

    Factorizations are cached per grid, so repeated coarse solves inside
    multigrid cycles only pay for the triangular solves.
    """
    grid = rhs.grid if grid is None else grid
    if rhs.grid != grid:
        raise ValueError(f"rhs lives on {rhs.grid}, expected {grid}")
    if grid.n_interior > cap:
        raise ValueError(f"{grid.n_interior} unknowns exceed the direct "
                         f"solver cap of {cap}; use cg_solve instead")
    b = rhs.interior.ravel(order='F')
    out = Field3.zeros(grid)
    if np.any(b):
        x = _factorized(grid).solve(b)
        out.values[1:-1, 1:-1, 1:-1] = x.reshape(
            tuple(n - 1 for n in grid.counts), order='F')
    return out
