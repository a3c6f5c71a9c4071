import numpy as np
import pytest

from excmg.grid import Field3, Grid3, apply_dirichlet, build_hierarchy, \
    sample_function
from excmg.classic_mg import (CycleConfig, mg_cycle, mg_solve,
                             prolong_trilinear, restrict_full_weighting)
from excmg.problems import Problem, catalog, get_problem
from excmg.solvers import cg_solve, direct_solve_coarse
from excmg.stencil import assemble_rhs


def test_cycle_config_validation():
    assert CycleConfig().name == 'V(1,1)-GS'
    assert CycleConfig(2, 2, 1, 'cg').name == 'W(2,1)-CG'
    for kw in ({'gamma': 3}, {'nu1': 0, 'nu2': 0}, {'nu1': -1},
               {'smoother': 'jacobi'}, {'eps': 0.0}):
        with pytest.raises(ValueError):
            CycleConfig(**kw)


def test_restrict_constant_and_zero():
    g = Grid3(8, 8, 8)
    r = Field3.zeros(g)
    r.values[1:-1, 1:-1, 1:-1] = 1.0
    rc = restrict_full_weighting(r)
    assert rc.grid.counts == (4, 4, 4)
    assert np.all(rc.values[2:-2, 2:-2, 2:-2] == 1.0)
    assert rc.values[0].max() == 0 and rc.values[:, :, -1].max() == 0
    assert not restrict_full_weighting(Field3.zeros(g)).values.any()


def test_restrict_spike():
    g = Grid3(8, 8, 8)
    r = Field3.zeros(g)
    r.values[4, 4, 4] = 1.0
    rc = restrict_full_weighting(r)
    assert rc.values[2, 2, 2] == 0.125
    assert rc.values.sum() == 0.125
    r = Field3.zeros(g)
    r.values[3, 4, 4] = 1.0     # odd x index: shared by two coarse nodes
    rc = restrict_full_weighting(r)
    assert rc.values[1, 2, 2] == rc.values[2, 2, 2] == 1/16


def test_restrict_rejects_odd():
    with pytest.raises(ValueError):
        restrict_full_weighting(Field3.zeros(Grid3(5, 4, 4)))


def test_prolong_constant_and_linear():
    c = sample_function(Grid3(4, 4, 4), lambda x, y, z: 2.0)
    f = prolong_trilinear(c)
    assert np.all(f.interior == 2.0)
    assert not f.values[0].any()
    x = sample_function(Grid3(4, 2, 2), lambda x, y, z: x + 0*y)
    fx = prolong_trilinear(x)
    exact = sample_function(fx.grid, lambda x, y, z: x + 0*y)
    np.testing.assert_allclose(fx.interior, exact.interior, rtol=1e-15)


def test_prolong_tensor_oracle():
    rng = np.random.default_rng(0)
    c = Field3(Grid3(2, 2, 2), rng.normal(size=(3, 3, 3)))
    f = prolong_trilinear(c)
    w = {0: ((0, 1.0),), 1: ((0, 0.5), (1, 0.5))}
    for i in range(1, 4):
        for j in range(1, 4):
            for k in range(1, 4):
                v = 0.0
                for di, wi in w[i % 2]:
                    for dj, wj in w[j % 2]:
                        for dk, wk in w[k % 2]:
                            v += wi*wj*wk*c.values[i//2 + di, j//2 + dj,
                                                   k//2 + dk]
                assert f.values[i, j, k] == pytest.approx(v, rel=1e-14,
                                                          abs=1e-15)


def test_prolong_rejects_mismatch():
    with pytest.raises(ValueError):
        prolong_trilinear(Field3.zeros(Grid3(2, 2, 2)), Grid3(4, 4, 6))


def test_restrict_prolong_constants_identity():
    c = sample_function(Grid3(4, 4, 4), lambda x, y, z: 1.0)
    back = restrict_full_weighting(prolong_trilinear(c))
    assert np.all(back.values[2:-2, 2:-2, 2:-2] == 1.0)


def _exact_discrete(problem, grid):
    rhs = assemble_rhs(sample_function(grid, problem.forcing_f),
                       problem.boundary_g)
    return rhs, apply_dirichlet(direct_solve_coarse(rhs, grid),
                                problem.boundary_g)


def test_cycle_fixed_point():
    h = build_hierarchy((2, 2, 2), levels_L=1)
    p = get_problem('ex1')
    rhs, u = _exact_discrete(p, h.finest)
    for cfg in (CycleConfig(), CycleConfig(2, 2, 1, 'cg')):
        out = mg_cycle(2, u, rhs, cfg, h)
        assert np.max(np.abs(out.values - u.values)) <= 1e-12
    with pytest.raises(ValueError):
        mg_cycle(1, u, rhs, CycleConfig(), h)


def test_zero_problem_zero_cycles():
    zero = Problem('zero', lambda x, y, z: 0*x, lambda x, y, z: 0*x)
    out = mg_solve(zero, build_hierarchy((2, 2, 2), levels_L=1),
                   CycleConfig())
    assert out.converged and out.cycles == 0


def test_mg_matches_cg_toy():
    h = build_hierarchy((2, 2, 2), levels_L=1)
    p = get_problem('ex3')
    rhs = assemble_rhs(sample_function(h.finest, p.forcing_f), p.boundary_g)
    cg = cg_solve(rhs, apply_dirichlet(Field3.zeros(h.finest), p.boundary_g),
                  1e-12)
    for cfg in (CycleConfig(eps=1e-12), CycleConfig(2, 2, 1, 'cg',
                                                    eps=1e-12)):
        mg = mg_solve(p, h, cfg)
        assert mg.converged
        assert np.max(np.abs(mg.solution.values - cg.solution.values)) <= 1e-10


@pytest.mark.parametrize('problem', catalog(), ids=lambda p: p.name)
def test_consistency_and_monotone_residual_16(problem):
    coarse = (8, 4, 2) if problem.name == 'ex4' else (4, 4, 4)
    h = build_hierarchy(coarse, levels_L=1)
    eps = 1e-12
    mg = mg_solve(problem, h, CycleConfig(eps=eps))
    rhs = assemble_rhs(sample_function(h.finest, problem.forcing_f),
                       problem.boundary_g)
    cg = cg_solve(rhs, apply_dirichlet(Field3.zeros(h.finest),
                                       problem.boundary_g), eps)
    scale = np.max(np.abs(cg.solution.values))
    assert np.max(np.abs(mg.solution.values - cg.solution.values)) \
        <= 10*eps*scale
    hist = np.array(mg.residual_history)
    assert np.all(np.diff(hist) <= 0)


def test_example_1_cycle_counts_64():
    h = build_hierarchy((4, 4, 4), levels_L=2)
    p = get_problem('ex1')
    v = mg_solve(p, h, CycleConfig(1, 1, 1, 'gs', eps=1e-14))
    w = mg_solve(p, h, CycleConfig(2, 2, 1, 'gs', eps=1e-14))
    vc = mg_solve(p, h, CycleConfig(1, 1, 1, 'cg', eps=1e-14))
    assert 13 <= v.cycles <= 19
    assert 9 <= w.cycles <= 15
    assert 10 <= vc.cycles <= 25


def test_example_4_w_cycle_counts():
    h = build_hierarchy((8, 4, 2), levels_L=2)
    w = mg_solve(get_problem('ex4'), h, CycleConfig(2, 2, 1, 'gs', eps=1e-9))
    assert 30 <= w.cycles <= 70
