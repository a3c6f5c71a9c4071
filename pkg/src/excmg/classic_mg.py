"""
Classical geometric V- and W-cycle multigrid for the compact scheme.

Coarse operators are re-discretizations of the 19-point scheme on each grid;
residuals are restricted by 27-point full weighting and corrections are
prolonged trilinearly. Smoothing is lexicographic Gauss-Seidel or a fixed
number of (restarted) CG steps.
"""
import time
from dataclasses import dataclass, field

import numpy as np

from excmg.grid import Field3, apply_dirichlet, sample_function, zeros
from excmg.solvers import (cg_iterate, direct_solve_coarse,
                           gauss_seidel_inplace)
from excmg.stencil import apply_interior, assemble_rhs

__all__ = ['CycleConfig', 'MgResult', 'restrict_full_weighting',
           'prolong_trilinear', 'mg_cycle', 'mg_solve']


@dataclass(frozen=True)
class CycleConfig:
    """Cycle parameters.

    ``gamma`` is the cycle index (1 = V, 2 = W); ``smoother`` is ``'gs'``
    or ``'cg'`` (``nu1``/``nu2`` CG steps restarted on every visit).
    """
    gamma: int = 1
    nu1: int = 1
    nu2: int = 1
    smoother: str = 'gs'
    coarsest_level: int = 0
    eps: float = 1e-10
    max_cycles: int = 500

    def __post_init__(self):
        if self.gamma not in (1, 2):
            raise ValueError(f"gamma must be 1 (V) or 2 (W), got "
                             f"{self.gamma}")
        if self.nu1 < 0 or self.nu2 < 0 or self.nu1 + self.nu2 < 1:
            raise ValueError("need nu1, nu2 >= 0 and nu1 + nu2 >= 1")
        if self.smoother not in ('gs', 'cg'):
            raise ValueError(f"unknown smoother {self.smoother!r}")
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")

    @property
    def name(self):
        cycle = 'V' if self.gamma == 1 else 'W'
        return f"{cycle}({self.nu1},{self.nu2})-{self.smoother.upper()}"


def _restrict(fine):
    # separable (1/4, 1/2, 1/4) weights along each axis
    t = fine
    for axis in range(3):
        t = np.moveaxis(t, axis, 0)
        c = np.zeros((t.shape[0]//2 + 1,) + t.shape[1:])
        c[1:-1] = 0.25*t[1:-2:2] + 0.5*t[2:-1:2] + 0.25*t[3::2]
        t = np.moveaxis(c, 0, axis)
    out = np.zeros(t.shape, order='F')
    out[1:-1, 1:-1, 1:-1] = t[1:-1, 1:-1, 1:-1]
    return out


def _prolong(coarse):
    t = coarse
    for axis in range(3):
        t = np.moveaxis(t, axis, 0)
        f = np.empty((2*(t.shape[0] - 1) + 1,) + t.shape[1:])
        f[::2] = t
        f[1::2] = 0.5*(t[:-1] + t[1:])
        t = np.moveaxis(f, 0, axis)
    out = np.zeros(t.shape, order='F')
    out[1:-1, 1:-1, 1:-1] = t[1:-1, 1:-1, 1:-1]
    return out


def restrict_full_weighting(r_fine):
    """27-point full weighting onto the grid with twice the mesh size.

    Coarse boundary entries are zero.
    """
    coarse = r_fine.grid.coarsen()
    return Field3(coarse, _restrict(r_fine.values))


def prolong_trilinear(e_coarse, fine_grid=None):
    """Trilinear interpolation onto the refined grid, zero fine boundary."""
    fine_grid = e_coarse.grid.refine() if fine_grid is None else fine_grid
    if fine_grid.counts != tuple(2*n for n in e_coarse.grid.counts):
        raise ValueError(f"{fine_grid} is not a refinement of "
                         f"{e_coarse.grid}")
    return Field3(fine_grid, _prolong(e_coarse.values))


def _smooth(u, b, grid, sweeps, cfg):
    if sweeps == 0:
        return
    if cfg.smoother == 'gs':
        gauss_seidel_inplace(u, b, grid, sweeps)
    else:
        cg_iterate(b, u, grid, max_iters=sweeps, check_tolerance=False)


def _cycle(level, u, b, grids, cfg):
    grid = grids[level]
    if level <= cfg.coarsest_level:
        u[...] = direct_solve_coarse(Field3(grid, b), grid).values
        return
    _smooth(u, b, grid, cfg.nu1, cfg)
    r = b - apply_interior(u, grid)
    rc = _restrict(r)
    ec = zeros(grids[level - 1])
    for _ in range(cfg.gamma):
        _cycle(level - 1, ec, rc, grids, cfg)
    u += _prolong(ec)
    _smooth(u, b, grid, cfg.nu2, cfg)


def mg_cycle(level, u, rhs, cfg, hierarchy):
    """One recursive cycle on ``hierarchy[level]``.

    ``u`` and ``rhs`` live on that grid; boundary values of ``u`` are kept
    and treated as eliminated. Returns the updated field.
    """
    grids = list(hierarchy)
    if u.grid != grids[level] or rhs.grid != grids[level]:
        raise ValueError("fields do not live on the requested level")
    work = u.with_zero_boundary().values
    _cycle(level, work, rhs.values, grids, cfg)
    out = u.copy()
    out.values[1:-1, 1:-1, 1:-1] = work[1:-1, 1:-1, 1:-1]
    return out


@dataclass
class MgResult:
    solution: Field3
    cycles: int
    residual_history: list = field(default_factory=list)
    converged: bool = False
    solve_seconds: float = 0.0


def mg_solve(problem, hierarchy, cfg, rhs=None):
    """Repeat cycles from a zero guess until ``||r|| <= eps ||rhs||``.

    ``residual_history[m]`` is the relative residual after ``m`` cycles.
    ``rhs`` may be given pre-assembled on the finest grid.
    """
    grids = list(hierarchy)
    fine = grids[-1]
    if rhs is None:
        rhs = assemble_rhs(sample_function(fine, problem.forcing_f),
                           problem.boundary_g, fine)
    b = rhs.values
    t0 = time.perf_counter()
    bnorm = np.linalg.norm(b.ravel(order='K'))
    u = zeros(fine)
    history = [1.0 if bnorm > 0 else 0.0]
    converged = bnorm == 0
    cycles = 0
    while not converged and cycles < cfg.max_cycles:
        _cycle(len(grids) - 1, u, b, grids, cfg)
        cycles += 1
        r = b - apply_interior(u, fine)
        history.append(np.linalg.norm(r.ravel(order='K')) / bnorm)
        converged = history[-1] <= cfg.eps
    elapsed = time.perf_counter() - t0
    solution = apply_dirichlet(Field3(fine, u), problem.boundary_g)
    return MgResult(solution, cycles, history, converged, elapsed)
