"""
Benchmark Dirichlet problems for ``u_xx + u_yy + u_zz = f`` on the unit cube.

All callables are vectorized over numpy arrays. Examples 5 and 6 have a
removable singularity at the origin (a boundary corner); there ``u``, its
gradient and ``f`` are set to their limit, zero.

Closed-form Laplacians, with ``r2 = (x-1/2)**2 + (y-1/2)**2 + (z-1/2)**2``
and ``rho = sqrt(x**2 + y**2 + z**2)``::

    ex3: u = exp(-3 r2),          f = (36 r2 - 18) exp(-3 r2)
    ex5: u = x^3 y^3 z^3 / rho^3, f = 6xyz(x^2y^2 + y^2z^2 + x^2z^2) / rho^3
                                      - 48 x^3 y^3 z^3 / rho^5
    ex6: u = xyz rho,             f = 8xyz / rho
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = ['Problem', 'catalog', 'get_problem', 'forcing_for_derived',
           'polynomial_problem']

SQRT2 = np.sqrt(2.0)
PI = np.pi


@dataclass(frozen=True)
class Problem:
    name: str
    forcing_f: Callable
    boundary_g: Callable
    exact_u: Optional[Callable] = None
    exact_gradient: Optional[Callable] = None
    extents: tuple = (1.0, 1.0, 1.0)
    recommended_coarse_counts: tuple = (4, 4, 4)
    recommended_eps: float = 1e-14
    description: str = ''


def _safe_div(num, den):
    num, den = np.broadcast_arrays(np.asarray(num, dtype=float),
                                   np.asarray(den, dtype=float))
    out = np.zeros(num.shape)
    np.divide(num, den, out=out, where=den != 0)
    return out


# Example 1
def _u1(x, y, z):
    return np.exp(z) * np.sin(x*y)


def _f1(x, y, z):
    return np.exp(z) * np.sin(x*y) * (1 - x**2 - y**2)


def _grad1(x, y, z):
    ez = np.exp(z)
    return (ez*y*np.cos(x*y), ez*x*np.cos(x*y), ez*np.sin(x*y))


# Example 2
def _u2(x, y, z):
    return np.exp(x + y) * np.sin(SQRT2*z)


def _f2(x, y, z):
    return np.zeros(np.broadcast(x, y, z).shape)


def _grad2(x, y, z):
    exy = np.exp(x + y)
    s = exy * np.sin(SQRT2*z)
    return (s, s, SQRT2*exy*np.cos(SQRT2*z))


# Example 3
def _r2(x, y, z):
    return (x - 0.5)**2 + (y - 0.5)**2 + (z - 0.5)**2


def _u3(x, y, z):
    return np.exp(-3*_r2(x, y, z))


def _f3(x, y, z):
    r2 = _r2(x, y, z)
    return (36*r2 - 18) * np.exp(-3*r2)


def _grad3(x, y, z):
    u = _u3(x, y, z)
    return (-6*(x - 0.5)*u, -6*(y - 0.5)*u, -6*(z - 0.5)*u)


# Example 4
def _u4(x, y, z):
    return np.sin(2*PI*x) * np.sin(PI*y) * np.sin(PI*z/2)


def _f4(x, y, z):
    return -5.25 * PI**2 * _u4(x, y, z)


def _grad4(x, y, z):
    sx, sy, sz = np.sin(2*PI*x), np.sin(PI*y), np.sin(PI*z/2)
    return (2*PI*np.cos(2*PI*x)*sy*sz,
            PI*sx*np.cos(PI*y)*sz,
            PI/2*sx*sy*np.cos(PI*z/2))


# Example 5
def _rho2(x, y, z):
    return x**2 + y**2 + z**2


def _u5(x, y, z):
    return _safe_div((x*y*z)**3, _rho2(x, y, z)**1.5)


def _f5(x, y, z):
    rho2 = _rho2(x, y, z)
    xyz = x*y*z
    pair = x**2*y**2 + y**2*z**2 + x**2*z**2
    return (_safe_div(6*xyz*pair, rho2**1.5)
            - _safe_div(48*xyz**3, rho2**2.5))


def _grad5(x, y, z):
    rho2 = _rho2(x, y, z)
    p = (x*y*z)**3
    r3, r5 = rho2**1.5, rho2**2.5
    return (_safe_div(3*x**2*(y*z)**3, r3) - _safe_div(3*x*p, r5),
            _safe_div(3*y**2*(x*z)**3, r3) - _safe_div(3*y*p, r5),
            _safe_div(3*z**2*(x*y)**3, r3) - _safe_div(3*z*p, r5))


# Example 6
def _u6(x, y, z):
    return x*y*z*np.sqrt(_rho2(x, y, z))


def _f6(x, y, z):
    return _safe_div(8*x*y*z, np.sqrt(_rho2(x, y, z)))


def _grad6(x, y, z):
    rho = np.sqrt(_rho2(x, y, z))
    xyz = x*y*z
    return (y*z*rho + _safe_div(xyz*x, rho),
            x*z*rho + _safe_div(xyz*y, rho),
            x*y*rho + _safe_div(xyz*z, rho))


_CATALOG = (
    Problem('ex1', _f1, _u1, _u1, _grad1, recommended_eps=1e-14,
            description='u = exp(z) sin(xy)'),
    Problem('ex2', _f2, _u2, _u2, _grad2, recommended_eps=1e-14,
            description='u = exp(x+y) sin(sqrt(2) z), harmonic'),
    Problem('ex3', _f3, _u3, _u3, _grad3, recommended_eps=1e-11,
            description='Gaussian centred at (1/2, 1/2, 1/2)'),
    Problem('ex4', _f4, _u4, _u4, _grad4,
            recommended_coarse_counts=(8, 4, 2), recommended_eps=1e-9,
            description='u = sin(2 pi x) sin(pi y) sin(pi z / 2)'),
    Problem('ex5', _f5, _u5, _u5, _grad5, recommended_eps=1e-12,
            description='u = x^3 y^3 z^3 / rho^3, singular at the origin'),
    Problem('ex6', _f6, _u6, _u6, _grad6, recommended_eps=1e-13,
            description='u = xyz rho, low regularity at the origin'),
)


def catalog():
    """The six benchmark problems ``ex1`` .. ``ex6``."""
    return list(_CATALOG)


def forcing_for_derived(problem):
    """Closed-form forcing of the problems whose ``f`` is derived from the
    exact solution (the Gaussian ``ex3`` and the singular ``ex5``)."""
    name = problem if isinstance(problem, str) else problem.name
    table = {'ex3': _f3, 'ex5': _f5}
    if name not in table:
        raise KeyError(f"{name} has no derived forcing")
    return table[name]


def polynomial_problem():
    """``u = x^2 y^2 + z``: reproduced exactly by the compact scheme."""
    def u(x, y, z):
        return x**2 * y**2 + z

    def f(x, y, z):
        return 2*y**2 + 2*x**2 + 0*z

    def grad(x, y, z):
        return (2*x*y**2, 2*x**2*y, np.ones(np.broadcast(x, y, z).shape))

    return Problem('poly', f, u, u, grad, recommended_coarse_counts=(2, 2, 2),
                   recommended_eps=1e-13,
                   description='u = x^2 y^2 + z (self-test)')


def get_problem(name):
    if name == 'poly':
        return polynomial_problem()
    for p in _CATALOG:
        if p.name == name:
            return p
    raise KeyError(f"unknown problem {name!r}; choose from "
                   f"{[p.name for p in _CATALOG] + ['poly']}")
