"""
Uniform rectilinear grids on boxes anchored at the origin, node-indexed
scalar fields, nested hierarchies and discrete norms.

Node ``(i, j, k)`` sits at ``(i*hx, j*hy, k*hz)`` for ``0 <= i <= nx`` etc.
Field values are stored as arrays of shape ``(nx+1, ny+1, nz+1)`` in Fortran
(x-fastest) order, so the flat position of node ``(i, j, k)`` is::

    i + (nx+1) * (j + (ny+1) * k)

which is what :meth:`Grid3.linear_index` returns and what
:attr:`Field3.flat` follows.
"""
from dataclasses import dataclass, field

import numpy as np

__all__ = ['Grid3', 'Field3', 'GridHierarchy', 'build_hierarchy',
           'norm_l2_interior', 'norm_inf_interior', 'sample_function',
           'norm_l2_nodes', 'norm_inf_nodes', 'apply_dirichlet', 'zeros',
           'interior_mask']


@dataclass(frozen=True)
class Grid3:
    """Uniform grid on ``[0, lx] x [0, ly] x [0, lz]``.

    Parameters
    ----------
    nx, ny, nz : int
        Interval counts per axis (at least 2).
    lx, ly, lz : float, default: 1.0
        Domain extents.
    """
    nx: int
    ny: int
    nz: int
    lx: float = 1.0
    ly: float = 1.0
    lz: float = 1.0

    def __post_init__(self):
        for n in self.counts:
            if int(n) != n or n < 2:
                raise ValueError(f"interval counts must be integers >= 2, "
                                 f"got {self.counts}")
        for ext in self.extents:
            if not ext > 0:
                raise ValueError(f"extents must be positive, got "
                                 f"{self.extents}")

    @property
    def counts(self):
        return (self.nx, self.ny, self.nz)

    @property
    def extents(self):
        return (self.lx, self.ly, self.lz)

    @property
    def hx(self):
        return self.lx / self.nx

    @property
    def hy(self):
        return self.ly / self.ny

    @property
    def hz(self):
        return self.lz / self.nz

    @property
    def spacing(self):
        return (self.hx, self.hy, self.hz)

    @property
    def shape(self):
        """Node-array shape ``(nx+1, ny+1, nz+1)``."""
        return (self.nx + 1, self.ny + 1, self.nz + 1)

    @property
    def n_nodes(self):
        return (self.nx + 1) * (self.ny + 1) * (self.nz + 1)

    @property
    def n_interior(self):
        return (self.nx - 1) * (self.ny - 1) * (self.nz - 1)

    def coords(self):
        """Return the 1D node coordinates ``(x, y, z)``."""
        return tuple(np.arange(n + 1) * h
                     for n, h in zip(self.counts, self.spacing))

    def linear_index(self, i, j, k):
        return i + (self.nx + 1) * (j + (self.ny + 1) * k)

    def node_index(self, n):
        """Inverse of :meth:`linear_index`."""
        n, i = divmod(n, self.nx + 1)
        k, j = divmod(n, self.ny + 1)
        return i, j, k

    def refine(self):
        """Grid with all mesh sizes halved."""
        return Grid3(2*self.nx, 2*self.ny, 2*self.nz, *self.extents)

    def coarsen(self):
        """Grid with all mesh sizes doubled; counts must be even."""
        if any(n % 2 for n in self.counts):
            raise ValueError(f"cannot coarsen odd counts {self.counts}")
        return Grid3(self.nx//2, self.ny//2, self.nz//2, *self.extents)

    def __str__(self):
        return f"{self.nx}x{self.ny}x{self.nz}"


def zeros(grid):
    """Zero node array of ``grid`` in x-fastest layout."""
    return np.zeros(grid.shape, order='F')


def interior_mask(grid):
    mask = np.zeros(grid.shape, dtype=bool, order='F')
    mask[1:-1, 1:-1, 1:-1] = True
    return mask


@dataclass
class Field3:
    """Scalar values at every node (boundary included) of a grid."""
    grid: Grid3
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != self.grid.shape:
            raise ValueError(f"values of shape {values.shape} do not match "
                             f"grid {self.grid} (expected {self.grid.shape})")
        self.values = np.asfortranarray(values)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, zeros(grid))

    @classmethod
    def from_flat(cls, grid, flat):
        """Build from values laid out by :meth:`Grid3.linear_index`."""
        flat = np.asarray(flat, dtype=np.float64)
        return cls(grid, flat.reshape(grid.shape, order='F'))

    @property
    def flat(self):
        """Copy of the values in linear-index order."""
        return self.values.ravel(order='F')

    @property
    def interior(self):
        return self.values[1:-1, 1:-1, 1:-1]

    def copy(self):
        return Field3(self.grid, self.values.copy(order='F'))

    def with_zero_boundary(self):
        out = Field3.zeros(self.grid)
        out.values[1:-1, 1:-1, 1:-1] = self.interior
        return out

    def _check(self, other):
        if isinstance(other, Field3):
            if other.grid != self.grid:
                raise ValueError(f"grid mismatch: {self.grid} vs "
                                 f"{other.grid}")
            return other.values
        return other

    def __add__(self, other):
        return Field3(self.grid, self.values + self._check(other))

    def __sub__(self, other):
        return Field3(self.grid, self.values - self._check(other))

    def __mul__(self, other):
        return Field3(self.grid, self.values * self._check(other))

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return Field3(self.grid, -self.values)


@dataclass(frozen=True)
class GridHierarchy:
    """Nested grids, coarsest first, each halving all mesh sizes.

    ``levels_L`` counts the grids beyond the two coarsest ones, so there are
    ``levels_L + 2`` grids.
    """
    grids: tuple
    levels_L: int

    def __post_init__(self):
        if len(self.grids) != self.levels_L + 2:
            raise ValueError("hierarchy must hold levels_L + 2 grids")
        for coarse, fine in zip(self.grids[:-1], self.grids[1:]):
            if fine.counts != tuple(2*n for n in coarse.counts):
                raise ValueError(f"{fine} is not a refinement of {coarse}")

    def __len__(self):
        return len(self.grids)

    def __getitem__(self, m):
        return self.grids[m]

    def __iter__(self):
        return iter(self.grids)

    @property
    def finest(self):
        return self.grids[-1]

    @property
    def coarsest(self):
        return self.grids[0]


def build_hierarchy(coarse_counts, extents=(1.0, 1.0, 1.0), levels_L=1):
    """Build the ``levels_L + 2`` nested grids from a coarsest grid.

    Coarsest counts must be even and at least 2 so that every level can be
    tiled by interpolation cells of 2x2x2 coarse elements.
    """
    coarse_counts = tuple(int(n) for n in coarse_counts)
    if len(coarse_counts) != 3 or len(extents) != 3:
        raise ValueError("need three counts and three extents")
    if any(n < 2 or n % 2 for n in coarse_counts):
        raise ValueError(f"coarse counts must be even and >= 2, got "
                         f"{coarse_counts}")
    if any(not e > 0 for e in extents):
        raise ValueError(f"extents must be positive, got {extents}")
    if levels_L < 1:
        raise ValueError(f"levels_L must be >= 1, got {levels_L}")

    grids = [Grid3(*coarse_counts, *extents)]
    for _ in range(levels_L + 1):
        grids.append(grids[-1].refine())
    return GridHierarchy(tuple(grids), levels_L)


def norm_l2_interior(e):
    """Volume-weighted discrete L2 norm over interior nodes.

    ``sqrt(hx*hy*hz * sum(e**2))`` with boundary nodes excluded.
    """
    g = e.grid
    vals = e.interior.ravel(order='F')
    return float(np.sqrt(g.hx*g.hy*g.hz * np.dot(vals, vals)))


def norm_inf_interior(e):
    """Maximum absolute value over interior nodes."""
    if e.grid.n_interior == 0:
        return 0.0
    return float(np.max(np.abs(e.interior)))


def norm_l2_nodes(e):
    """Volume-weighted L2 norm over all nodes, boundary included.

    For quantities that do not vanish on the boundary, such as gradient
    errors.
    """
    g = e.grid
    vals = e.values.ravel(order='K')
    return float(np.sqrt(g.hx*g.hy*g.hz * np.dot(vals, vals)))


def norm_inf_nodes(e):
    """Maximum absolute value over all nodes, boundary included."""
    return float(np.max(np.abs(e.values)))


def _node_mesh(grid):
    x, y, z = grid.coords()
    return np.meshgrid(x, y, z, indexing='ij')


def _evaluate(phi, x, y, z):
    vals = np.broadcast_to(np.asarray(phi(x, y, z), dtype=np.float64),
                           np.broadcast(x, y, z).shape)
    if not np.all(np.isfinite(vals)):
        raise ValueError("function returned non-finite values on the grid")
    return vals


def sample_function(grid, phi):
    """Evaluate ``phi(x, y, z)`` (vectorized) at every node."""
    return Field3(grid, _evaluate(phi, *_node_mesh(grid)))


def apply_dirichlet(u, g):
    """Copy of ``u`` with all boundary nodes set to ``g(x, y, z)``."""
    out = u.copy()
    axes = u.grid.coords()
    for side in (slice(0, 1), slice(-1, None)):
        for axis in range(3):
            pts = list(axes)
            pts[axis] = pts[axis][side]
            index = [slice(None)] * 3
            index[axis] = side
            out.values[tuple(index)] = _evaluate(
                g, *np.meshgrid(*pts, indexing='ij'))
    return out
