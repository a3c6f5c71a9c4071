"""
Convergence studies, method comparisons and their CSV / text reports, plus
the ``excmg-bench`` command line.

Examples
--------
::

    excmg-bench run --problem ex1 --method excmg --levels 6 --eps 1e-14 \\
        --out ex1.csv
    excmg-bench compare --problem ex4 --levels 6

``--levels`` is the total number of nested grids, the two direct-solve grids
included (``levels - 2`` cascade levels).

CSV layout (one row per level, fixed header ``CSV_HEADER``); residual
histories go to ``<path>.residuals.csv`` with columns ``level, iteration,
relative_residual``. Exit codes: 0 success, 1 bad arguments, 2 a solve did
not converge.
"""
import argparse
import csv
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from excmg.excmg import (ConvergenceError, ExcmgConfig, build_initial_guess,
                         excmg_solve)
from excmg.grid import (Field3, apply_dirichlet, build_hierarchy,
                        norm_inf_interior, norm_inf_nodes, norm_l2_interior,
                        norm_l2_nodes, sample_function)
from excmg.gradient import gradient
from excmg.classic_mg import CycleConfig, mg_solve
from excmg.problems import get_problem
from excmg.solvers import cg_solve, direct_solve_coarse
from excmg.stencil import assemble_rhs

__all__ = ['StudyRow', 'SolveReport', 'run_study', 'compute_orders',
           'emit_report', 'read_report_csv', 'format_error', 'warmup',
           'compare', 'main', 'ERROR_COLUMNS', 'CSV_HEADER', 'METHODS']

METHODS = ('excmg', 'vcycle', 'wcycle', 'cg')

ERROR_COLUMNS = ('err_u_l2', 'err_u_inf', 'err_grad_l2', 'err_grad_inf',
                 'err_enh_l2', 'err_enh_inf', 'err_guess_l2', 'err_guess_inf')

CSV_HEADER = (('level', 'nx', 'ny', 'nz', 'iterations', 'converged')
              + sum(((c, 'order_' + c[4:]) for c in ERROR_COLUMNS), ())
              + ('wall_seconds', 'guess_seconds'))

# errors below this are roundoff; their orders carry no information
SATURATION = 1e-13


@dataclass
class StudyRow:
    level: int
    counts: tuple
    iterations: int = 0
    converged: bool = True
    errors: dict = field(default_factory=dict)
    orders: dict = field(default_factory=dict)
    wall_seconds: float = 0.0
    guess_seconds: float = 0.0

    @property
    def saturated(self):
        err = self.errors.get('err_u_inf')
        return err is not None and err < SATURATION

    def __getattr__(self, name):
        # err_* columns read as attributes; None when not computed
        if name in ERROR_COLUMNS:
            return self.errors.get(name)
        raise AttributeError(name)


@dataclass
class SolveReport:
    method: str
    problem: str
    eps: float
    rows: list = field(default_factory=list)
    residual_histories: dict = field(default_factory=dict)
    total_seconds: float = 0.0
    converged: bool = True

    def row(self, counts):
        for r in self.rows:
            if tuple(r.counts) == tuple(counts):
                return r
        raise KeyError(counts)


def compute_orders(rows):
    """Fill ``row.orders`` with ``log2(previous error / this error)``.

    The first row gets no orders; a zero or missing error gives ``nan``.
    """
    for prev, this in zip(rows[:-1], rows[1:]):
        for col in ERROR_COLUMNS:
            a, b = prev.errors.get(col), this.errors.get(col)
            if a is None and b is None:
                continue
            if not a or not b:
                this.orders[col] = math.nan
            else:
                this.orders[col] = math.log2(a / b)
    if rows:
        rows[0].orders = {}
    return rows


def _errors(problem, u, w=None, enhanced=None, with_gradient=True):
    out = {}
    if problem.exact_u is not None:
        e = u - sample_function(u.grid, problem.exact_u)
        out['err_u_l2'] = norm_l2_interior(e)
        out['err_u_inf'] = norm_inf_interior(e)
        if enhanced is not None:
            e = enhanced - sample_function(u.grid, problem.exact_u)
            out['err_enh_l2'] = norm_l2_interior(e)
            out['err_enh_inf'] = norm_inf_interior(e)
    if with_gradient and problem.exact_gradient is not None \
            and min(u.grid.counts) >= 4:
        mesh = np.meshgrid(*u.grid.coords(), indexing='ij')
        exact = problem.exact_gradient(*mesh)
        comps = gradient(u).components
        errs = [c - np.broadcast_to(x, u.grid.shape)
                for c, x in zip(comps, exact)]
        out['err_grad_l2'] = math.sqrt(sum(norm_l2_nodes(e)**2
                                           for e in errs))
        out['err_grad_inf'] = max(norm_inf_nodes(e) for e in errs)
    if w is not None:
        out['err_guess_l2'] = norm_l2_interior(w - u)
        out['err_guess_inf'] = norm_inf_interior(w - u)
    return out


_WARM = False


def warmup():
    """Compile the kernels and build the interpolation table once, so that
    timed solves exclude one-off costs."""
    global _WARM
    if _WARM:
        return
    problem = get_problem('poly')
    hierarchy = build_hierarchy((2, 2, 2), levels_L=2)
    excmg_solve(problem, hierarchy, ExcmgConfig(1e-10, 2))
    for smoother in ('gs', 'cg'):
        mg_solve(problem, hierarchy, CycleConfig(eps=1e-6, max_cycles=2,
                                                 smoother=smoother))
    _WARM = True


def run_study(problem_name, method='excmg', levels=6, eps=None,
              smoother='gs', nu1=None, nu2=None, coarse_counts=None,
              enhance=True, with_gradient=True):
    """Run one method over a hierarchy of ``levels`` grids.

    EXCMG reports one row per grid from the third one on (the first two are
    direct solves); the other methods report the finest grid only.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    problem = get_problem(problem_name)
    eps = problem.recommended_eps if eps is None else eps
    coarse_counts = (problem.recommended_coarse_counts
                     if coarse_counts is None else tuple(coarse_counts))
    if levels < 3:
        raise ValueError("need at least 3 grids")
    hierarchy = build_hierarchy(coarse_counts, problem.extents, levels - 2)
    warmup()
    report = SolveReport(method, problem.name, eps)

    if method == 'excmg':
        rhs = [assemble_rhs(sample_function(g, problem.forcing_f),
                            problem.boundary_g, g) for g in hierarchy]
        cfg = ExcmgConfig(eps, levels - 2, enhance=enhance)
        try:
            result = excmg_solve(problem, hierarchy, cfg, rhs=rhs)
            records = result.levels
        except ConvergenceError as err:
            records = err.levels
            report.converged = False
        report.total_seconds = sum(r.solve_seconds + r.guess_seconds
                                   for r in records)
        for m, rec in enumerate(records):
            if m < 2:
                continue
            row = StudyRow(m, rec.grid.counts, rec.iterations, rec.converged,
                           wall_seconds=rec.solve_seconds,
                           guess_seconds=rec.guess_seconds)
            row.errors = _errors(problem, rec.solution, rec.initial_guess,
                                 rec.enhanced, with_gradient)
            report.rows.append(row)
            report.residual_histories[m] = list(rec.residual_history)
        compute_orders(report.rows)
        return report

    fine = hierarchy.finest
    rhs = assemble_rhs(sample_function(fine, problem.forcing_f),
                       problem.boundary_g, fine)
    m = len(hierarchy) - 1
    if method == 'cg':
        u0 = apply_dirichlet(Field3.zeros(fine), problem.boundary_g)
        t0 = time.perf_counter()
        out = cg_solve(rhs, u0, eps, max_iters=50 * max(fine.counts))
        elapsed = time.perf_counter() - t0
        solution, its, hist, ok = (out.solution, out.iterations,
                                   out.residual_history, out.converged)
    else:
        gamma = 1 if method == 'vcycle' else 2
        nu1 = (1 if gamma == 1 else 2) if nu1 is None else nu1
        nu2 = 1 if nu2 is None else nu2
        cfg = CycleConfig(gamma, nu1, nu2, smoother, eps=eps)
        out = mg_solve(problem, hierarchy, cfg, rhs=rhs)
        solution, its, hist, ok, elapsed = (out.solution, out.cycles,
                                            out.residual_history,
                                            out.converged, out.solve_seconds)
    row = StudyRow(m, fine.counts, its, ok, wall_seconds=elapsed)
    row.errors = _errors(problem, solution, with_gradient=with_gradient)
    report.rows.append(row)
    report.residual_histories[m] = list(hist)
    report.total_seconds = elapsed
    report.converged = ok
    return report


def compare(problem_name, levels=6, eps=None, smoother='gs',
            coarse_counts=None):
    """EXCMG, V(1,1) and W(2,1) back to back on the same problem."""
    return {method: run_study(problem_name, method, levels, eps, smoother,
                              coarse_counts=coarse_counts, enhance=False,
                              with_gradient=False)
            for method in ('vcycle', 'wcycle', 'excmg')}


# Reports

def format_error(value):
    """``8.49e-13`` -> ``'8.49(-13)'``."""
    if value is None:
        return ''
    if value == 0 or not math.isfinite(value):
        return f"{value:.2f}"
    mantissa, exponent = f"{value:.2e}".split('e')
    sign = '-' if exponent[0] == '-' else ''
    return f"{mantissa}({sign}{int(exponent[1:]):02d})"


def _fmt_float(v):
    if v is None:
        return ''
    return repr(float(v))


def _csv_rows(report):
    for r in report.rows:
        line = [r.level, *r.counts, r.iterations, int(r.converged)]
        for col in ERROR_COLUMNS:
            line.append(_fmt_float(r.errors.get(col)))
            line.append(_fmt_float(r.orders.get(col)))
        line += [_fmt_float(r.wall_seconds), _fmt_float(r.guess_seconds)]
        yield line


def _text_table(report):
    cols = [c for c in ERROR_COLUMNS
            if any(c in r.errors for r in report.rows)]
    head = ['mesh', 'iters'] + sum(([c[4:], 'order'] for c in cols), [])
    lines = [f"{report.problem} {report.method} eps={report.eps:g}",
             '\t'.join(head)]
    for r in report.rows:
        cells = ['x'.join(map(str, r.counts)), str(r.iterations)]
        for c in cols:
            cells.append(format_error(r.errors.get(c)))
            o = r.orders.get(c)
            cells.append('' if o is None else f"{o:.2f}")
        lines.append('\t'.join(cells))
    lines.append(f"total solve time {report.total_seconds:.2f} s")
    return '\n'.join(lines) + '\n'


def emit_report(report, format='csv', path=None):
    """Write ``report`` as CSV (plus residual histories) or as a text table.

    With ``path=None`` the text table is returned instead of written.
    """
    if format == 'text':
        text = _text_table(report)
        if path is None:
            return text
        with open(path, 'w') as fh:
            fh.write(text)
        return None
    if format != 'csv':
        raise ValueError(f"unknown format {format!r}")
    with open(path, 'w', newline='') as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        writer.writerows(_csv_rows(report))
    with open(f"{path}.residuals.csv", 'w', newline='') as fh:
        writer = csv.writer(fh)
        writer.writerow(('level', 'iteration', 'relative_residual'))
        for level, hist in sorted(report.residual_histories.items()):
            for it, value in enumerate(hist):
                writer.writerow((level, it, repr(float(value))))
    return None


def read_report_csv(path):
    """Parse a CSV written by :func:`emit_report` back into rows."""
    rows = []
    with open(path, newline='') as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path} does not carry the report header")
        for rec in reader:
            def num(key):
                return float(rec[key]) if rec[key] != '' else None
            row = StudyRow(int(rec['level']),
                           (int(rec['nx']), int(rec['ny']), int(rec['nz'])),
                           int(rec['iterations']), rec['converged'] == '1')
            for col in ERROR_COLUMNS:
                if num(col) is not None:
                    row.errors[col] = num(col)
                order = num('order_' + col[4:])
                if order is not None:
                    row.orders[col] = order
            row.wall_seconds = num('wall_seconds')
            row.guess_seconds = num('guess_seconds')
            rows.append(row)
    return rows


def _comparison_table(reports):
    lines = ['method\titers\tCPU\t|u_h-u|_inf\tCPU_wh']
    for method, rep in reports.items():
        row = rep.rows[-1]
        wh = (format(sum(r.guess_seconds for r in rep.rows), '.2f')
              if method == 'excmg' else '')
        lines.append(f"{method}\t{row.iterations}\t{rep.total_seconds:.2f}\t"
                     f"{format_error(row.errors.get('err_u_inf'))}\t{wh}")
    return '\n'.join(lines) + '\n'


# Command line

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _counts(text):
    try:
        counts = tuple(int(v) for v in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad counts {text!r}")
    if len(counts) != 3:
        raise argparse.ArgumentTypeError("need three comma-separated counts")
    return counts


def _parser():
    parser = _Parser(prog='excmg-bench', description=__doc__.split('\n')[1])
    sub = parser.add_subparsers(dest='command', required=True,
                                parser_class=_Parser)

    def common(p):
        p.add_argument('--problem', required=True,
                       choices=['ex1', 'ex2', 'ex3', 'ex4', 'ex5', 'ex6',
                                'poly'])
        p.add_argument('--levels', type=int, default=6,
                       help='total number of nested grids (default 6)')
        p.add_argument('--coarse', type=_counts, default=None,
                       help='coarsest interval counts, e.g. 4,4,4')
        p.add_argument('--eps', type=float, default=None)
        p.add_argument('--smoother', choices=['gs', 'cg'], default='gs')
        p.add_argument('--out', default=None, help='CSV output path')

    run = sub.add_parser('run', help='one method over a hierarchy')
    common(run)
    run.add_argument('--method', choices=METHODS, default='excmg')
    run.add_argument('--nu1', type=int, default=None)
    run.add_argument('--nu2', type=int, default=None)
    run.add_argument('--enhance', action=argparse.BooleanOptionalAction,
                     default=True)
    run.add_argument('--format', choices=['csv', 'text'], default='csv')

    cmp_ = sub.add_parser('compare', help='EXCMG vs V- and W-cycles')
    common(cmp_)
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == 'run':
            report = run_study(args.problem, args.method, args.levels,
                               args.eps, args.smoother, args.nu1, args.nu2,
                               args.coarse, enhance=args.enhance)
            sys.stdout.write(emit_report(report, 'text'))
            if args.out:
                emit_report(report, args.format, args.out)
            return 0 if report.converged else 2
        reports = compare(args.problem, args.levels, args.eps, args.smoother,
                          args.coarse)
    except ValueError as err:
        sys.stderr.write(f"excmg-bench: error: {err}\n")
        return 1
    sys.stdout.write(_comparison_table(reports))
    if args.out:
        for method, rep in reports.items():
            emit_report(rep, 'csv', f"{args.out}.{method}.csv")
    return 0 if all(r.converged for r in reports.values()) else 2


if __name__ == '__main__':
    sys.exit(main())
