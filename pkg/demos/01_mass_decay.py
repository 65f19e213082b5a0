"""
Mass decay and the rescaled time
================================

The diffusivity is the total mass, so everything hinges on the scalar
``a(t) = int_0^t M``. For data with a finite first moment ``M1`` the mass
falls like ``t^{-1/3}`` and ``a`` grows like ``c t^{2/3}``.
"""

import numpy as np

from nonlocal_diffusion import Indicator, PowerTail, asymptotic_constants, loglog_slope, solve_a

# the indicator of [1, 2]: unit mass, first moment 3/2
ic = Indicator(1.0, 2.0)
resc = solve_a(ic, 1e5)

t = np.geomspace(1e4, 1e5, 40)
fit = loglog_slope(t, resc.mass_at(t), (1e4, 1e5))
print(f"slope of log M vs log t on [1e4, 1e5]: {fit.slope:.5f}  (expected -1/3)")

c = asymptotic_constants(1.5).c
print(f"a(1e5) / 1e5^(2/3) = {resc.a_at(1e5) / 1e5 ** (2 / 3):.5f}  against c = {c:.5f}")

# a few samples of the trajectory
for s in (1.0, 10.0, 100.0, 1e3, 1e4, 1e5):
    print(f"  t = {s:8.0f}   a = {resc.a_at(s):12.4f}   M = {resc.mass_at(s):.6f}")

# heavy tails: no first moment, faster growth of a
tail = solve_a(PowerTail(1.5), 1e5)
fit = loglog_slope(t, tail.a_at(t), (1e4, 1e5))
print(f"power-tail data (delta = 1.5): a grows like t^{fit.slope:.3f}  (2/(delta+1) = 0.8)")
