import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from excmg.grid import Field3, Grid3, sample_function
from excmg.gradient import ONE_SIDED_WEIGHTS, gradient, gradient_component


def test_one_sided_weights_consistent():
    # exact for 1, x, .., x^4 on nodes 0..4 (unit spacing)
    for p in range(5):
        value = sum(w * k**p for k, w in enumerate(ONE_SIDED_WEIGHTS))
        assert value == pytest.approx(1.0 if p == 1 else 0.0, abs=1e-13)


def test_linear_exact():
    g = Grid3(4, 4, 4)
    d = gradient_component(sample_function(g, lambda x, y, z: x), 'x')
    np.testing.assert_allclose(d.values, 1.0, rtol=1e-13)


def test_quartic_on_four_intervals():
    g = Grid3(4, 4, 4)
    d = gradient_component(sample_function(g, lambda x, y, z: x**4 + 0*y), 0)
    exact = sample_function(g, lambda x, y, z: 4*x**3 + 0*y)
    np.testing.assert_allclose(d.values, exact.values, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=125, max_size=125),
       st.sampled_from([(4, 4, 4), (5, 6, 7), (8, 4, 6)]))
def test_quartic_exactness(coef, counts):
    c = np.array(coef).reshape(5, 5, 5)
    g = Grid3(*counts, 1.0, 0.8, 1.2)

    def u(x, y, z):
        return np.polynomial.polynomial.polyval3d(x, y, z, c)

    grad = gradient(sample_function(g, u))
    derivs = (np.polynomial.polynomial.polyder(c, axis=a) for a in range(3))
    mesh = np.meshgrid(*g.coords(), indexing='ij')
    for comp, dc in zip(grad.components, derivs):
        exact = np.polynomial.polynomial.polyval3d(*mesh, dc)
        scale = max(1.0, np.abs(exact).max())
        assert np.max(np.abs(comp.values - exact)) <= 1e-11 * scale


def test_constant_and_affine():
    g = Grid3(6, 4, 5)
    for comp in gradient(sample_function(g, lambda x, y, z: 3.0)).components:
        assert np.max(np.abs(comp.values)) <= 1e-12
    grad = gradient(sample_function(g, lambda x, y, z: x + 2*y + 3*z))
    for comp, v in zip(grad.components, (1, 2, 3)):
        np.testing.assert_allclose(comp.values, v, rtol=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.floats(-5, 5), st.floats(-5, 5))
def test_linearity(seed, alpha, beta):
    g = Grid3(6, 5, 4)
    rng = np.random.default_rng(seed)
    u = Field3(g, rng.normal(size=g.shape))
    v = Field3(g, rng.normal(size=g.shape))
    lhs = gradient(alpha*u + beta*v)
    gu, gv = gradient(u), gradient(v)
    for a, b, c in zip(lhs.components, gu.components, gv.components):
        np.testing.assert_allclose(a.values, alpha*b.values + beta*c.values,
                                   atol=1e-12*max(1, abs(alpha), abs(beta))
                                   * 400)


def test_axis_needs_four_intervals():
    g = Grid3(4, 3, 4)
    u = Field3.zeros(g)
    with pytest.raises(ValueError):
        gradient_component(u, 'y')
    with pytest.raises(ValueError):
        gradient_component(u, 'w')


def test_fourth_order_convergence_smooth():
    def u(x, y, z):
        return np.exp(z) * np.sin(x*y)

    errs = []
    for n in (8, 16, 32):
        g = Grid3(n, n, n)
        d = gradient_component(sample_function(g, u), 'z')
        errs.append(np.max(np.abs(d.values - sample_function(g, u).values)))
    orders = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(orders > 3.8)
