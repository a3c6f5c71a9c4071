"""
The compact operator and the linear solvers
===========================================

Build a small grid, sample a problem, assemble the eliminated right-hand
side and solve it three ways: sparse direct, conjugate gradients and
Gauss-Seidel sweeps. Direct and CG agree to the solver tolerance; 300
plain Gauss-Seidel sweeps are still visibly short of convergence, which is
the slowness multigrid removes. The discrete solution is fourth-order
accurate.
"""
import numpy as np

from excmg import (Field3, Grid3, apply_dirichlet, assemble_matrix,
                   assemble_rhs, cg_solve, direct_solve_coarse,
                   gauss_seidel_sweep, get_problem, norm_inf_interior,
                   residual, sample_function)

problem = get_problem('ex1')
grid = Grid3(16, 16, 16)
print(grid.counts, grid.spacing)

# %%
# The operator is symmetric positive definite (it is stored negated).
A = assemble_matrix(Grid3(4, 4, 4)).toarray()
print('symmetric:', np.array_equal(A, A.T),
      ' smallest eigenvalue: %.3f' % np.linalg.eigvalsh(A).min())

# %%
# Right-hand side with the Dirichlet data folded in.
rhs = assemble_rhs(sample_function(grid, problem.forcing_f),
                   problem.boundary_g)
exact = sample_function(grid, problem.exact_u)

direct = apply_dirichlet(direct_solve_coarse(rhs, grid), problem.boundary_g)
start = apply_dirichlet(Field3.zeros(grid), problem.boundary_g)
cg = cg_solve(rhs, start, eps=1e-12)
print('CG iterations', cg.iterations, 'last relative residual %.2e'
      % cg.residual_history[-1])

gs = start
for _ in range(300):
    gs = gauss_seidel_sweep(gs, rhs)

for name, u in (('direct', direct), ('cg', cg.solution), ('gs', gs)):
    r = np.linalg.norm(residual(u, rhs).values) / np.linalg.norm(rhs.values)
    print('%-6s |u_h - u|_inf = %.3e   relative residual = %.1e'
          % (name, norm_inf_interior(u - exact), r))

# %%
# Fourth order: halve h and the error drops by about 16.
errors = []
for n in (8, 16, 32):
    g = Grid3(n, n, n)
    b = assemble_rhs(sample_function(g, problem.forcing_f), problem.boundary_g)
    u = apply_dirichlet(direct_solve_coarse(b, g), problem.boundary_g)
    errors.append(norm_inf_interior(u - sample_function(g, problem.exact_u)))
print('orders', np.round(np.log2(np.array(errors[:-1]) / errors[1:]), 3))
