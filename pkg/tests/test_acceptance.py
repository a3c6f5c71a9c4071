"""Acceptance suite at desk scale (finest grid 128^3, 256x128x64 for ex4).

Every criterion runs at its stated tolerance and appends one PASS/FAIL line
to the acceptance summary printed at the end of the session. Lines marked
``info`` are supplementary and never gate. Set ``EXCMG_ACCEPT_256=1`` to add
the optional 256^3 runs for every example (ex1 at 256^3 always runs).
"""
import math
import os

import numpy as np
import pytest
import scipy.linalg as sla

from excmg.excmg import (InterpolationCell, interpolation_table,
                         quarter_point_weights, richardson_true,
                         triquartic_fill)
from excmg.grid import Field3, Grid3, apply_dirichlet, sample_function, \
    norm_inf_nodes
from excmg.harness import run_study
from excmg.solvers import direct_solve_coarse, thomas_solve
from excmg.stencil import assemble_matrix, assemble_rhs

pytestmark = pytest.mark.slow

EXAMPLES = ('ex1', 'ex2', 'ex3', 'ex4', 'ex5', 'ex6')
LEVELS = 6
GRIDS_FROM_32 = ((32,)*3, (64,)*3, (128,)*3)

_CACHE = {}


def study(name, method='excmg', levels=LEVELS, **kw):
    key = (name, method, levels, tuple(sorted(kw.items())))
    if key not in _CACHE:
        _CACHE[key] = run_study(name, method, levels, **kw)
    return _CACHE[key]


def within(value, target, rel):
    return abs(value - target) <= rel * abs(target)


def inside(value, lo, hi):
    return lo <= value <= hi


def verdict(verdicts, number, checks, info=()):
    """checks: list of (label, ok) pairs; info: extra non-gating labels."""
    ok = all(c for _, c in checks)
    failed = [label for label, c in checks if not c]
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}"
    if failed:
        line += ' | failed: ' + '; '.join(failed)
    passed = [label for label, c in checks if c]
    if passed:
        line += ' | passed: ' + '; '.join(passed)
    if info:
        line += ' | info: ' + '; '.join(info)
    verdicts.append(line)
    print(line)
    return ok, failed


def fmt(values):
    return '[' + ', '.join(f"{v:.3g}" for v in values) + ']'


def test_criterion_1_discretization_accuracy(verdicts):
    rep = study('ex1')
    target = {16: 5.47e-8, 32: 3.43e-9, 64: 2.15e-10}
    checks = []
    for n, t in target.items():
        e = rep.row((n,)*3).err_u_inf
        checks.append((f"|u_h-u|inf {n}^3 = {e:.3g} vs {t:.3g} (10%)",
                       within(e, t, 0.10)))
    for n in (32, 64, 128):
        o = rep.row((n,)*3).orders['err_u_inf']
        checks.append((f"order {n}^3 = {o:.3f} in [3.95, 4.05]",
                       inside(o, 3.95, 4.05)))
    ok, failed = verdict(verdicts, 1, checks)
    assert ok, failed


def test_criterion_2_fifth_order_initial_guess(verdicts):
    rep = study('ex1')
    target = {32: 1.31e-7, 64: 4.19e-9, 128: 1.32e-10}
    checks = []
    for n, t in target.items():
        e = rep.row((n,)*3).err_guess_inf
        checks.append((f"ex1 |w_h-u_h|inf {n}^3 = {e:.3g} vs {t:.3g} (15%)",
                       within(e, t, 0.15)))
    for name in EXAMPLES[:5]:
        r = study(name)
        orders = [row.orders['err_guess_l2'] for row in r.rows[1:]]
        meshes = ['x'.join(map(str, row.counts)) for row in r.rows[1:]]
        for mesh, o in zip(meshes, orders):
            checks.append((f"{name} L2 guess order {mesh} = {o:.2f} "
                           "in [4.8, 5.2]", inside(o, 4.8, 5.2)))
    ok, failed = verdict(verdicts, 2, checks)
    assert ok, failed


def test_criterion_3_sixth_order_enhancement(verdicts):
    rep = study('ex2')
    checks = []
    for counts in GRIDS_FROM_32:
        o = rep.row(counts).orders['err_enh_inf']
        e = rep.row(counts).err_enh_inf
        checks.append((f"ex2 enhanced order {counts[0]}^3 = {o:.2f} "
                       f"(err {e:.3g}) in [5.5, 6.0]", inside(o, 5.5, 6.0)))
    ok, failed = verdict(verdicts, 3, checks)
    assert ok, failed


def test_criterion_4_gradient_recovery(verdicts):
    checks = []
    rep = study('ex1')
    for counts in GRIDS_FROM_32:
        o = rep.row(counts).orders['err_grad_inf']
        checks.append((f"ex1 gradient order {counts[0]}^3 = {o:.3f} "
                       "in [3.9, 4.05]", inside(o, 3.9, 4.05)))
    rep = study('ex6')
    for counts in GRIDS_FROM_32:
        o = rep.row(counts).orders['err_grad_inf']
        checks.append((f"ex6 gradient order {counts[0]}^3 = {o:.2f} "
                       "in [2.9, 3.1]", inside(o, 2.9, 3.1)))
    for counts in GRIDS_FROM_32:
        o = rep.row(counts).orders['err_enh_inf']
        e = rep.row(counts).err_enh_inf
        checks.append((f"ex6 enhanced order {counts[0]}^3 = {o:.2f} "
                       f"(err {e:.3g}) in [3.4, 3.7]", inside(o, 3.4, 3.7)))
    ok, failed = verdict(verdicts, 4, checks)
    assert ok, failed


def _finest_at_256(name):
    return study(name, levels=LEVELS + 1, enhance=False,
                 with_gradient=False).rows[-1].iterations


def test_criterion_5_excmg_efficiency(verdicts):
    checks, info = [], []
    for name in EXAMPLES:
        rep = study(name)
        its = [r.iterations for r in rep.rows]
        finest = rep.rows[-1]
        checks.append((f"{name} finest {'x'.join(map(str, finest.counts))} "
                       f"CG iterations = {finest.iterations} <= 12",
                       finest.iterations <= 12))
        checks.append((f"{name} finest <= third level ({fmt(its)})",
                       its[-1] <= its[0]))
    extra = EXAMPLES if os.environ.get('EXCMG_ACCEPT_256') else ('ex1',)
    for name in extra:
        info.append(f"{name} finest iterations one grid finer = "
                    f"{_finest_at_256(name)}")
    ok, failed = verdict(verdicts, 5, checks, info)
    assert ok, failed


def test_criterion_6_baseline_comparison(verdicts):
    checks, info = [], []
    table = {'ex1': 16, 'ex2': 16, 'ex5': 14, 'ex6': 15}
    for name in EXAMPLES:
        v = study(name, 'vcycle')
        w = study(name, 'wcycle')
        e = study(name, enhance=False, with_gradient=False)
        if name in table:
            n = v.rows[0].iterations
            checks.append((f"{name} V(1,1)-GS cycles = {n} vs {table[name]} "
                           "(30%)", within(n, table[name], 0.30)))
        checks.append((f"{name} EXCMG {e.total_seconds:.2f}s < "
                       f"V {v.total_seconds:.2f}s and W "
                       f"{w.total_seconds:.2f}s",
                       e.total_seconds < min(v.total_seconds,
                                             w.total_seconds)))
        info.append(f"{name} W(2,1) cycles = {w.rows[0].iterations}")
    ok, failed = verdict(verdicts, 6, checks, info)
    assert ok, failed


# Criterion 7: the compact forms of the always-on property suites; the full
# versions live in the per-module test files.

def _dense_symmetric_pd(counts):
    A = assemble_matrix(Grid3(*counts)).toarray()
    return (np.array_equal(A, A.T)
            and np.linalg.eigvalsh(A).min() > 0)


def _poly5_exact():
    def u(x, y, z):
        return x**5 + x**2 * y**3 * z + y * z**4 - 2*x*y*z

    def f(x, y, z):
        return 20*x**3 + 2*y**3*z + 6*x**2*y*z + 12*y*z**2

    g = Grid3(8, 6, 4)
    rhs = assemble_rhs(sample_function(g, f), u)
    uh = apply_dirichlet(direct_solve_coarse(rhs, g), u)
    return np.max(np.abs(uh.values - sample_function(g, u).values))


def _triquartic_errors():
    cell = InterpolationCell((0, 0, 0))
    src = cell.source_nodes / 8
    tgt = cell.target_nodes / 8
    c = np.random.default_rng(1).uniform(-1, 1, (5, 5, 5))

    def q(p):
        return np.polynomial.polynomial.polyval3d(*p.T, c)

    const = np.max(np.abs(triquartic_fill(cell, np.full(125, 2.5)) - 2.5))
    quart = np.max(np.abs(triquartic_fill(cell, q(src)) - q(tgt)))
    return const, quart


def _richardson_reduction():
    def u(x, y, z):
        return np.sin(x + 2*y) * np.cos(z)

    def a(x, y, z):
        return 1 + x*y + np.exp(z)*y**2

    worst = math.inf
    for n in (4, 8, 16):
        fine_g, coarse_g = Grid3(*(2*n,)*3), Grid3(*(n,)*3)
        exact = sample_function(fine_g, u)
        fine = Field3(fine_g, exact.values
                      + (1/(2*n))**4 * sample_function(fine_g, a).values)
        coarse = Field3(coarse_g, sample_function(coarse_g, u).values
                        + (1/n)**4 * sample_function(coarse_g, a).values)
        raw = norm_inf_nodes(fine - exact)
        enh = norm_inf_nodes(richardson_true(fine, coarse) - exact)
        worst = min(worst, raw / max(enh, 1e-300))
    return worst


def _thomas_error():
    rng = np.random.default_rng(4)
    worst = 0.0
    for n in (2, 7, 30):
        lo, up = rng.normal(size=n - 1), rng.normal(size=n - 1)
        d = 4 + np.abs(rng.normal(size=n))
        b = rng.normal(size=n)
        T = np.diag(d) + np.diag(lo, -1) + np.diag(up, 1)
        worst = max(worst, np.max(np.abs(thomas_solve(lo, d, up, b)
                                         - sla.solve(T, b))))
    return worst


def _interface_bitwise():
    fine = np.random.default_rng(6).normal(size=(17, 17, 17))
    values = {}
    for anchor in ((0, 0, 0), (8, 0, 0), (0, 8, 0), (8, 8, 8)):
        cell = InterpolationCell(anchor)
        for t, v in zip(map(tuple, cell.target_nodes),
                        triquartic_fill(cell, cell.gather(fine))):
            if t in values and values[t] != v:
                return False
            values[t] = v
    return True


def test_criterion_7_property_suites(verdicts):
    const, quart = _triquartic_errors()
    w = quarter_point_weights()[0]
    poly = _poly5_exact()
    reduction = _richardson_reduction()
    thomas = _thomas_error()
    T = interpolation_table()
    checks = [
        ("operator symmetric positive definite on 2^3..8^3",
         all(_dense_symmetric_pd(c) for c in ((2, 2, 2), (4, 6, 4),
                                              (8, 8, 8)))),
        (f"degree-5 polynomial solution error {poly:.2g} <= 1e-10",
         poly <= 1e-10),
        (f"tri-quartic constant {const:.2g} and quartic {quart:.2g} "
         "<= 1e-12", const <= 1e-12 and quart <= 1e-12),
        ("quarter-point weights sum (35+140-70+28-5)/128 = 1",
         w == [35, 140, -70, 28, -5] and sum(w) == 128
         and np.allclose(T.sum(axis=1), 1.0, atol=1e-14)),
        (f"Richardson h^4 reduction {reduction:.3g}x >= 50x",
         reduction >= 50),
        (f"Thomas vs dense {thomas:.2g} <= 1e-12", thomas <= 1e-12),
        ("cell-interface values bitwise identical", _interface_bitwise()),
    ]
    ok, failed = verdict(verdicts, 7, checks)
    assert ok, failed


def test_criterion_8_residual_history(verdicts):
    checks = []
    for name in EXAMPLES:
        rep = study(name)
        finest = rep.rows[-1]
        hist = rep.residual_histories[finest.level]
        below = next((i for i, v in enumerate(hist) if v < rep.eps), None)
        checks.append((f"{name} starts at {hist[0]:.2g} < 1e-5",
                       hist[0] < 1e-5))
        checks.append((f"{name} below eps={rep.eps:g} after "
                       f"{below} iterations (<= 12)",
                       below is not None and below <= 12))
    ok, failed = verdict(verdicts, 8, checks)
    assert ok, failed
