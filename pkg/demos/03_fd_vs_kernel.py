"""
Finite differences against the image kernel
===========================================

The explicit scheme lags the mass by one step. Its default time step is
90% of the stability limit ``dx^2 / (2 M(0))``.
"""

import numpy as np

from nonlocal_diffusion import FdConfig, Grid1D, Indicator, KernelRun, run_fd, solve_a
from nonlocal_diffusion.kernel_solver import evaluate_at

ic = Indicator(1.0, 2.0)
resc = solve_a(ic, 60.0)

for dx in (0.2, 0.1, 0.05):
    grid = Grid1D.from_spacing(200.0, dx)
    res = run_fd(FdConfig(grid, 50.0, (50.0,)), ic)
    fld, rec = res[0]
    ref = evaluate_at(KernelRun(ic, resc, grid), fld.t, grid.nodes)
    gap = np.max(np.abs(fld.values - ref))
    print(f"dx = {dx:5.3f}  dt = {res.dt:.2e}  sup gap at t=50: {gap:.3e}  FD mass {rec.mass:.5f}")

# pointwise sampling of the jump adds about one cell of mass, so the gap
# shrinks only linearly in dx
