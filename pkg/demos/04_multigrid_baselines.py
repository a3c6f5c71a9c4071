"""
EXCMG against classical multigrid
=================================

V(1,1) and W(2,1) cycles with Gauss-Seidel smoothing, standard full
weighting and trilinear transfers, compared with the cascade on the same
hierarchy. Runs at 64^3 so it finishes in a few seconds.
"""
from excmg import CycleConfig, build_hierarchy, get_problem, mg_solve
from excmg.harness import compare, format_error, warmup

problem = get_problem('ex2')
hierarchy = build_hierarchy((4, 4, 4), levels_L=2)
warmup()        # compile the kernels so the timings below are clean

for cfg in (CycleConfig(1, 1, 1, 'gs', eps=1e-14),
            CycleConfig(2, 2, 1, 'gs', eps=1e-14),
            CycleConfig(1, 1, 1, 'cg', eps=1e-14)):
    out = mg_solve(problem, hierarchy, cfg)
    print('%-10s cycles %3d  %.2f s  final residual %.1e'
          % (cfg.name, out.cycles, out.solve_seconds,
             out.residual_history[-1]))

# %%
# The harness packages the same comparison, adding the EXCMG run.
reports = compare('ex2', levels=5)
for method, rep in reports.items():
    row = rep.rows[-1]
    print('%-7s iters %3d  %.2f s  |u_h-u|_inf %s'
          % (method, row.iterations, rep.total_seconds,
             format_error(row.err_u_inf)))
