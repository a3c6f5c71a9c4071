"""
Extrapolation cascadic multigrid (EXCMG) for the 3D Poisson equation with a
19-point fourth-order compact scheme, classical V/W-cycle baselines, Richardson
enhancement and fourth-order gradient recovery.

Modules
-------
grid        grids, fields, hierarchies and norms
stencil     matrix-free operator and right-hand side
solvers     CG, Gauss-Seidel, Thomas and the coarse direct solve
classic_mg  V- and W-cycle multigrid
excmg       extrapolation, tri-quartic interpolation and the cascade driver
gradient    compact fourth-order gradient recovery
problems    benchmark problem catalog
harness     convergence studies, reports and the ``excmg-bench`` CLI
"""
from excmg.grid import (Field3, Grid3, GridHierarchy, apply_dirichlet,
                        build_hierarchy, norm_inf_interior, norm_inf_nodes,
                        norm_l2_interior, norm_l2_nodes, sample_function)
from excmg.stencil import (OperatorCoefficients, apply_interior,
                           apply_operator, assemble_matrix, assemble_rhs,
                           residual)
from excmg.solvers import (CgOutcome, cg_solve, direct_solve_coarse,
                           gauss_seidel_sweep, thomas_solve)
from excmg.classic_mg import CycleConfig, MgResult, mg_cycle, mg_solve
from excmg.excmg import (ConvergenceError, ExcmgConfig, ExcmgResult,
                         InterpolationCell, LevelRecord, build_initial_guess,
                         excmg_solve, richardson_true, triquartic_fill)
from excmg.gradient import GradientField, gradient, gradient_component
from excmg.problems import Problem, catalog, get_problem, polynomial_problem
from excmg.harness import (SolveReport, StudyRow, compute_orders, emit_report,
                           read_report_csv, run_study)

__version__ = '0.1.0'

__all__ = [
    'Field3', 'Grid3', 'GridHierarchy', 'apply_dirichlet', 'build_hierarchy',
    'norm_inf_interior', 'norm_inf_nodes', 'norm_l2_interior',
    'norm_l2_nodes', 'sample_function',
    'OperatorCoefficients', 'apply_interior', 'apply_operator',
    'assemble_matrix', 'assemble_rhs', 'residual',
    'CgOutcome', 'cg_solve', 'direct_solve_coarse', 'gauss_seidel_sweep',
    'thomas_solve',
    'CycleConfig', 'MgResult', 'mg_cycle', 'mg_solve',
    'ConvergenceError', 'ExcmgConfig', 'ExcmgResult', 'InterpolationCell',
    'LevelRecord', 'build_initial_guess', 'excmg_solve', 'richardson_true',
    'triquartic_fill',
    'GradientField', 'gradient', 'gradient_component',
    'Problem', 'catalog', 'get_problem', 'polynomial_problem',
    'SolveReport', 'StudyRow', 'compute_orders', 'emit_report',
    'read_report_csv', 'run_study',
]
