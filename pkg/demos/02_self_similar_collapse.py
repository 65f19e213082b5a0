"""
Collapse onto the self-similar profile
======================================

The kernel solver gives the solution from ``a(t)`` alone. Rescaling
``eta = x / sqrt(a)`` and multiplying by ``a`` should bring every profile
onto ``(M1 / (2 sqrt(pi))) eta exp(-eta^2 / 4)``.
"""

import numpy as np

from nonlocal_diffusion import Grid1D, Indicator, KernelRun, attractor_error, collapse, evaluate, solve_a

ic = Indicator(1.0, 2.0)
resc = solve_a(ic, 5e4)
run = KernelRun(ic, resc, Grid1D.from_spacing(400.0, 0.1))

times = (50.0, 500.0, 5000.0, 50000.0)
fields = [evaluate(run, t) for t in times]
report = collapse(fields, resc, 1.5)
for t, d in zip(report.times, report.distances):
    print(f"t = {t:7.0f}   rescaled distance d(t) = {d:.3e}")
print(f"fitted exponent of d(t): {report.exponent:.3f}")

# unscaled sup-norm error: decays faster than the 1/t bound
for t in times:
    err = attractor_error(evaluate(run, t), resc, 1.5)
    print(f"t = {t:7.0f}   sup|u - attractor| = {err:.3e}   times t = {err * t:.3e}")

# where the peak sits: sqrt(2 a) for the attractor
for fld in fields:
    i = int(np.argmax(fld.values))
    print(f"t = {fld.t:7.0f}   peak at x = {fld.grid.nodes[i]:7.2f}   sqrt(2a) = {np.sqrt(2 * resc.a_at(fld.t)):7.2f}")
