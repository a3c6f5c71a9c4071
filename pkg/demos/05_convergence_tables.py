"""
Convergence tables, CSV output and the command line
===================================================

``run_study`` produces one row per grid with errors and observed orders;
``emit_report`` writes it as CSV (plus a residual-history file) or as a
text table. The ``excmg-bench`` command wraps the same calls.
"""
import os
import subprocess
import sys
import tempfile

from excmg.harness import emit_report, main, read_report_csv, run_study

report = run_study('ex3', 'excmg', levels=5)
print(emit_report(report, 'text'))

# %%
# CSV round trip.
out = os.path.join(tempfile.mkdtemp(), 'ex3.csv')
emit_report(report, 'csv', out)
rows = read_report_csv(out)
print(len(rows), 'rows;', 'orders of the guess error:',
      [round(r.orders.get('err_guess_l2', float('nan')), 2) for r in rows])
print(open(out + '.residuals.csv').read().splitlines()[:3])

# %%
# The command line: exit status 0 on success, 1 for bad arguments and 2 when
# a solve does not converge.
code = main(['run', '--problem', 'ex6', '--levels', '4', '--format', 'text'])
print('exit status', code)
cmd = [sys.executable, '-m', 'excmg', 'run', '--problem', 'ex9']
print('bad problem ->', subprocess.run(cmd, capture_output=True).returncode)
