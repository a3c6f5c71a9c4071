"""
The EXCMG cascade
=================

Two direct solves on the coarsest grids, then on every finer grid a
fifth-order initial guess built from the two previous solutions, a few CG
iterations, a sixth-order enhanced solution and a fourth-order gradient.
"""
import numpy as np

from excmg import (ExcmgConfig, build_hierarchy, excmg_solve, get_problem,
                   gradient, norm_inf_interior, sample_function)

problem = get_problem('ex1')
hierarchy = build_hierarchy((4, 4, 4), levels_L=3)     # 4^3 .. 64^3
result = excmg_solve(problem, hierarchy, ExcmgConfig(eps=1e-14, levels_L=3))

print('%-10s %-7s %6s %12s %12s %12s %12s'
      % ('mesh', 'method', 'iters', '|u_h-u|', '|w_h-u_h|', '|enh-u|',
         '|grad err|'))
for rec in result.levels:
    exact = sample_function(rec.grid, problem.exact_u)
    err = norm_inf_interior(rec.solution - exact)
    guess = (norm_inf_interior(rec.initial_guess - rec.solution)
             if rec.initial_guess is not None else np.nan)
    enh = (norm_inf_interior(rec.enhanced - exact)
           if rec.enhanced is not None else np.nan)
    mesh = np.meshgrid(*rec.grid.coords(), indexing='ij')
    gerr = max(np.abs(c.values - e).max()
               for c, e in zip(gradient(rec.solution).components,
                               problem.exact_gradient(*mesh)))
    print('%-10s %-7s %6d %12.3e %12.3e %12.3e %12.3e'
          % ('x'.join(map(str, rec.grid.counts)), rec.method,
             rec.iterations, err, guess, enh, gerr))

# %%
# The initial guess on the finest grid is already far below the
# discretization error, so CG only has to remove a sliver of algebraic
# error. Its residual history starts low:
hist = result.finest.residual_history
print('finest grid: %d CG iterations, residual %.1e -> %.1e'
      % (len(hist) - 1, hist[0], hist[-1]))
