"""
Extrapolation cascadic multigrid.

Two direct solves on the coarsest grids start the cascade. On every finer
grid an initial guess is built from the two previous solutions by
Richardson-type extrapolation at the nodes of the previous grid followed by
tri-quartic Lagrange interpolation on cells of 2x2x2 elements of the grid
before it, and CG then drives the relative residual below ``eps``. An
optional sixth-order enhanced solution is formed from the current and the
previous solution.

Node classes relative to a pair of nested grids (coarse mesh ``2h`` inside
fine mesh ``h``), by how many fine indices are odd:

* 0 odd -- "corners", shared with the coarse grid;
* 1 odd -- edge midpoints, extrapolated along the odd axis;
* 2 odd -- face centres, mean over the two face diagonals;
* 3 odd -- element centres, mean over the four space diagonals.
"""
import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from excmg.grid import Field3, apply_dirichlet, sample_function
from excmg.solvers import cg_solve, direct_solve_coarse
from excmg.stencil import assemble_rhs

__all__ = ['ExcmgConfig', 'InterpolationCell', 'LevelRecord',
           'ExcmgResult', 'ConvergenceError', 'extrapolate_corner',
           'extrapolate_midpoint', 'richardson_corner', 'richardson_midpoint',
           'interpolation_table', 'quarter_point_weights', 'triquartic_fill',
           'build_initial_guess', 'richardson_true', 'excmg_solve']


# Pointwise formulas

def extrapolate_corner(u_mid, u_coarse):
    """Predict the next finer solution at a node shared by both grids:
    ``(17 u_mid - u_coarse) / 16``."""
    return (17*u_mid - u_coarse) / 16


def extrapolate_midpoint(u_mid_at_m, u_mid_a, u_coarse_a, u_mid_b,
                         u_coarse_b):
    """Predict the next finer solution at the midpoint ``m`` of two coarse
    nodes ``a`` and ``b``."""
    return u_mid_at_m + (u_mid_a - u_coarse_a + u_mid_b - u_coarse_b) / 32


def richardson_corner(u_fine, u_coarse):
    """Sixth-order value at a coarse node: ``(16 u_fine - u_coarse) / 15``."""
    return (16*u_fine - u_coarse) / 15


def richardson_midpoint(u_fine_at_m, u_fine_a, u_coarse_a, u_fine_b,
                        u_coarse_b):
    return u_fine_at_m + (u_fine_a - u_coarse_a + u_fine_b - u_coarse_b) / 30


def _extrapolate_nodes(fine, coarse, corner_fn, midpoint_fn):
    """Apply the node-class formulas on every node of the fine array.

    ``fine`` holds one solution on a grid, ``coarse`` another on the grid
    with twice the mesh size. The result lives on the fine array's grid.
    """
    fine_at_coarse = fine[::2, ::2, ::2]
    out = np.empty_like(fine, order='F')
    out[::2, ::2, ::2] = corner_fn(fine_at_coarse, coarse)

    for odd in itertools.product((False, True), repeat=3):
        n_odd = sum(odd)
        if n_odd == 0:
            continue
        target = tuple(slice(1, None, 2) if o else slice(0, None, 2)
                       for o in odd)
        u_m = fine[target]
        odd_axes = [ax for ax in range(3) if odd[ax]]
        # the diagonals through m: sign vectors s with s[0] = +1 pair with -s
        acc = None
        n_diag = 0
        for tail in itertools.product((1, -1), repeat=n_odd - 1):
            signs = (1,) + tail
            ends = []
            for sgn in (signs, tuple(-s for s in signs)):
                sel = [slice(None)] * 3
                for ax, s in zip(odd_axes, sgn):
                    sel[ax] = slice(1, None) if s > 0 else slice(None, -1)
                sel = tuple(sel)
                ends.append((fine_at_coarse[sel], coarse[sel]))
            value = midpoint_fn(u_m, ends[0][0], ends[0][1],
                                ends[1][0], ends[1][1])
            acc = value if acc is None else acc + value
            n_diag += 1
        out[target] = acc if n_diag == 1 else acc / n_diag
    return out


# Tri-quartic interpolation on a cell of 2x2x2 coarse elements

def _lagrange_1d(t):
    """Quartic Lagrange basis on nodes 0..4 evaluated at ``t`` (exact)."""
    t = Fraction(t)
    weights = []
    for i in range(5):
        w = Fraction(1)
        for k in range(5):
            if k != i:
                w *= (t - k) / Fraction(i - k)
        weights.append(w)
    return weights


def quarter_point_weights():
    """Weights (times 128) for the four quarter points of a pair of coarse
    elements, from the 1D quartic basis. Rows belong to the points at 1/4,
    3/4, 5/4 and 7/4 of the coarse mesh size."""
    rows = [_lagrange_1d(Fraction(a, 2)) for a in (1, 3, 5, 7)]
    return [[int(w * 128) for w in row] for row in rows]


# Rows for 1/4, 3/4, 5/4, 7/4; the last two mirror the first two.
_QUARTER_POINT_WEIGHTS = [[35, 140, -70, 28, -5],
                          [-5, 60, 90, -20, 3],
                          [3, -20, 90, 60, -5],
                          [-5, 28, -70, 140, 35]]


@dataclass(frozen=True)
class _Table:
    weights: np.ndarray         # (604, 125)
    targets: np.ndarray         # (604, 3) fine-node offsets 0..8
    sources: np.ndarray         # (125, 3) fine-node offsets 0, 2, .., 8
    groups: tuple               # (rows, columns, weights) per odd count


@lru_cache(maxsize=1)
def _table():
    if quarter_point_weights() != _QUARTER_POINT_WEIGHTS:
        raise AssertionError("quartic basis disagrees with the quarter-point "
                             "weights")
    basis = [_lagrange_1d(Fraction(a, 2)) for a in range(9)]

    sources = np.array([(2*p, 2*q, 2*r) for r in range(5) for q in range(5)
                        for p in range(5)])
    targets = np.array([(a, b, c) for c in range(9) for b in range(9)
                        for a in range(9) if a % 2 or b % 2 or c % 2])

    weights = np.zeros((len(targets), len(sources)))
    groups = {1: ([], [], []), 2: ([], [], []), 3: ([], [], [])}
    for row, (a, b, c) in enumerate(targets):
        cols, ws = [], []
        for col, (p, q, r) in enumerate(sources // 2):
            w = basis[a][p] * basis[b][q] * basis[c][r]
            if w != 0:
                weights[row, col] = float(w)
                cols.append(col)
                ws.append(float(w))
        n_odd = int(a % 2 + b % 2 + c % 2)
        groups[n_odd][0].append(row)
        groups[n_odd][1].append(cols)
        groups[n_odd][2].append(ws)

    packed = tuple((np.array(r), np.array(c), np.array(w))
                   for r, c, w in groups.values())
    return _Table(weights, targets, sources, packed)


def interpolation_table():
    """The dense 604x125 tri-quartic weight matrix of one cell.

    Rows follow the cell-local target offsets ``(a, b, c)`` in 0..8 (not all
    even) in x-fastest order; columns follow the sources ``(2p, 2q, 2r)`` in
    x-fastest order, i.e. column ``p + 5 q + 25 r``.
    """
    return _table().weights.copy()


@dataclass(frozen=True)
class InterpolationCell:
    """A block of 2x2x2 coarse elements = 9x9x9 fine nodes.

    ``anchor`` is the fine-grid index of the cell origin, a multiple of 8.
    """
    anchor: tuple

    @property
    def source_nodes(self):
        return _table().sources + np.asarray(self.anchor)

    @property
    def target_nodes(self):
        return _table().targets + np.asarray(self.anchor)

    def source_classes(self):
        """Counts of corners, edge midpoints, face centres and element
        centres among the 125 sources."""
        odd = ((_table().sources // 2) % 2).sum(axis=1)
        return tuple(int(np.sum(odd == n)) for n in range(4))

    def gather(self, values):
        """Source values of this cell from a fine-grid node array."""
        idx = self.source_nodes
        return values[idx[:, 0], idx[:, 1], idx[:, 2]]


def _apply_table(sources):
    """Tri-quartic values, shape ``(ncell, 604)``, from ``(ncell, 125)``
    source values."""
    tab = _table()
    out = np.empty((sources.shape[0], tab.weights.shape[0]))
    for rows, cols, ws in tab.groups:
        if cols.shape[1] == 125:
            # element-interior targets belong to one cell only
            out[:, rows] = sources @ ws.T
        else:
            # Fixed accumulation order: nodes on faces and edges shared by
            # neighbouring cells come out bitwise identical from each.
            vals = sources[:, cols[:, 0]] * ws[:, 0]
            for t in range(1, cols.shape[1]):
                vals += sources[:, cols[:, t]] * ws[:, t]
            out[:, rows] = vals
    return out


def triquartic_fill(cell, source_values):
    """Tri-quartic values at the 604 non-source nodes of a cell.

    ``source_values`` follows the column order of
    :func:`interpolation_table`; ``cell`` only fixes where the results go
    (see :attr:`InterpolationCell.target_nodes`).
    """
    source_values = np.asarray(source_values, dtype=np.float64)
    if source_values.shape != (125,):
        raise ValueError("need exactly 125 source values")
    return _apply_table(source_values[None, :])[0]


def _fill_cells(coarse_values, fine_shape):
    """Tri-quartic fill of a fine array from values on the grid with twice
    its mesh size, cell by cell (vectorized over cells)."""
    tab = _table()
    fine = np.empty(fine_shape, order='F')
    fine[::2, ::2, ::2] = coarse_values

    ncx, ncy, ncz = ((n - 1) // 8 for n in fine_shape)
    windows = sliding_window_view(coarse_values, (5, 5, 5))[::4, ::4, ::4]
    sources = windows.transpose(0, 1, 2, 5, 4, 3).reshape(-1, 125)
    cx, cy, cz = (a.ravel() * 8 for a in np.meshgrid(
        np.arange(ncx), np.arange(ncy), np.arange(ncz), indexing='ij'))
    offs = tab.targets
    fine[cx[:, None] + offs[:, 0], cy[:, None] + offs[:, 1],
         cz[:, None] + offs[:, 2]] = _apply_table(sources)
    return fine


def _check_nested(fine, coarse):
    if fine.grid.counts != tuple(2*n for n in coarse.grid.counts):
        raise ValueError(f"{fine.grid} is not a refinement of "
                         f"{coarse.grid}")
    if fine.grid.extents != coarse.grid.extents:
        raise ValueError("grids cover different domains")


def build_initial_guess(u_2h, u_4h, fine_grid=None, g=None):
    """Fifth-order prediction of the solution on the next finer grid.

    Parameters
    ----------
    u_2h, u_4h : Field3
        Solutions on the current grid and the one before it.
    fine_grid : Grid3, optional
        The next finer grid; defaults to ``u_2h.grid.refine()``.
    g : callable, optional
        Dirichlet data imposed on the boundary of the result.
    """
    _check_nested(u_2h, u_4h)
    if any(n % 2 for n in u_4h.grid.counts):
        raise ValueError(f"cannot tile {u_4h.grid} by cells of 2x2x2 "
                         f"elements: counts must be even")
    fine_grid = u_2h.grid.refine() if fine_grid is None else fine_grid
    if fine_grid.counts != tuple(2*n for n in u_2h.grid.counts):
        raise ValueError(f"{fine_grid} is not a refinement of {u_2h.grid}")

    predicted = _extrapolate_nodes(u_2h.values, u_4h.values,
                                   extrapolate_corner, extrapolate_midpoint)
    w = Field3(fine_grid, _fill_cells(predicted, fine_grid.shape))
    if g is not None:
        w = apply_dirichlet(w, g)
    return w


def richardson_true(u_h, u_2h, g=None):
    """Sixth-order enhanced solution on the grid of ``u_h``."""
    _check_nested(u_h, u_2h)
    enhanced = Field3(u_h.grid, _extrapolate_nodes(
        u_h.values, u_2h.values, richardson_corner, richardson_midpoint))
    if g is not None:
        enhanced = apply_dirichlet(enhanced, g)
    return enhanced


# Driver

@dataclass(frozen=True)
class ExcmgConfig:
    eps: float
    levels_L: int
    enhance: bool = True
    max_iters: int = None

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.levels_L < 1:
            raise ValueError(f"levels_L must be >= 1, got {self.levels_L}")


@dataclass
class LevelRecord:
    """What happened on one grid of the cascade."""
    grid: object
    method: str
    solution: Field3
    iterations: int = 0
    residual_history: list = field(default_factory=list)
    converged: bool = True
    solve_seconds: float = 0.0
    guess_seconds: float = 0.0
    initial_guess: Field3 = None
    enhanced: Field3 = None


@dataclass
class ExcmgResult:
    levels: list

    @property
    def finest(self):
        return self.levels[-1]

    @property
    def solve_seconds(self):
        return sum(lv.solve_seconds + lv.guess_seconds for lv in self.levels)


class ConvergenceError(RuntimeError):
    """A level failed to reach the tolerance; ``levels`` holds the records
    up to and including the failing one."""

    def __init__(self, message, levels):
        super().__init__(message)
        self.levels = levels


def _level_rhs(problem, grid):
    return assemble_rhs(sample_function(grid, problem.forcing_f),
                        problem.boundary_g, grid)


def excmg_solve(problem, hierarchy, cfg, rhs=None):
    """Run the cascade over ``hierarchy``.

    Parameters
    ----------
    problem : Problem
        Supplies the forcing and the Dirichlet data.
    hierarchy : GridHierarchy
        ``cfg.levels_L + 2`` nested grids.
    cfg : ExcmgConfig
    rhs : list of Field3, optional
        Pre-assembled right-hand sides per grid (keeps sampling out of the
        timed region).

    Returns
    -------
    ExcmgResult
    """
    if len(hierarchy) != cfg.levels_L + 2:
        raise ValueError(f"hierarchy has {len(hierarchy)} grids, config "
                         f"expects {cfg.levels_L + 2}")
    if rhs is None:
        rhs = [_level_rhs(problem, grid) for grid in hierarchy]
    g = problem.boundary_g
    levels = []

    for grid, b in zip(hierarchy.grids[:2], rhs[:2]):
        t0 = time.perf_counter()
        u = apply_dirichlet(direct_solve_coarse(b, grid), g)
        levels.append(LevelRecord(grid, 'dsolve', u,
                                  solve_seconds=time.perf_counter() - t0))

    for grid, b in zip(hierarchy.grids[2:], rhs[2:]):
        u_2h, u_4h = levels[-1].solution, levels[-2].solution
        t0 = time.perf_counter()
        w = build_initial_guess(u_2h, u_4h, grid, g)
        t1 = time.perf_counter()
        out = cg_solve(b, w, cfg.eps, cfg.max_iters)
        t2 = time.perf_counter()
        record = LevelRecord(grid, 'cg', out.solution, out.iterations,
                             out.residual_history, out.converged,
                             solve_seconds=t2 - t1, guess_seconds=t1 - t0,
                             initial_guess=w)
        levels.append(record)
        if not out.converged:
            raise ConvergenceError(
                f"CG did not reach eps={cfg.eps:g} on {grid} within "
                f"{out.iterations} iterations (last relative residual "
                f"{out.residual_history[-1]:.3e})", levels)
        if cfg.enhance:
            record.enhanced = richardson_true(out.solution, u_2h, g)
    return ExcmgResult(levels)
