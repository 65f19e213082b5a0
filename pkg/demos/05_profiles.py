"""
The self-similar family f_mu
============================

Solutions of the form ``t^{mu-1} g(x / t^mu)`` lead to
``f_mu(xi) = xi 1F1(1/(2 mu), 3/2; -mu xi^2 / 2)``. Only ``mu = 1/3`` has
finite mass; there the profile is ``xi exp(-xi^2 / 6)``.
"""

import numpy as np

from nonlocal_diffusion import f_mu
from nonlocal_diffusion.profile import f_mu_tail_exponent

xi = np.linspace(0, 6, 7)
print("xi    mu=0 (sin)   mu=1/3      mu=1/2      mu=2/3")
for v in xi:
    print(f"{v:3.0f}  {f_mu(0.0, v):+.6f}   {f_mu(1 / 3, v):+.6f}   {f_mu(0.5, v):+.6f}   {f_mu(2 / 3, v):+.6f}")

print("closed form at mu = 1/3:", np.max(np.abs(f_mu(1 / 3, xi) - xi * np.exp(-xi**2 / 6))))

for mu in (0.5, 2 / 3, 0.8):
    print(f"mu = {mu:.3f}: tail slope {f_mu_tail_exponent(mu, 50, 200):+.4f}, predicted {1 - 1 / mu:+.4f}")
