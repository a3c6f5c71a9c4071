"""
A solution with limited smoothness
==================================

For ``u = xyz sqrt(x^2 + y^2 + z^2)`` the fifth derivatives are singular at
the origin. The scheme keeps its fourth order in ``u``, the enhancement
can no longer reach sixth order, and the gradient drops to third order.
"""
import numpy as np

from excmg.harness import run_study

smooth = run_study('ex1', 'excmg', levels=5)
rough = run_study('ex6', 'excmg', levels=5)

for name, rep in (('ex1', smooth), ('ex6', rough)):
    print(name)
    for col in ('err_u_inf', 'err_enh_inf', 'err_grad_inf'):
        orders = [r.orders[col] for r in rep.rows[1:]]
        print('  %-13s orders %s' % (col, np.round(orders, 2)))
