"""
The Dirichlet problem on (0, pi)
================================

On a bounded interval every sine mode decays as ``exp(-n^2 a)``. Single-mode
data gives the explicit solution ``(M/2) sin x / (1 + M t)``; other data
approach it at rate ``1/t^2``.
"""

import math

import numpy as np

from nonlocal_diffusion import ExplicitSolution, Indicator, ScaledSine, evaluate_bounded, solve_bounded_a, spectral_state

x = np.linspace(0, math.pi, 201)

s = solve_bounded_a(spectral_state(ScaledSine(2.0)), 100.0)
w = ExplicitSolution(2.0)
err = max(np.max(np.abs(evaluate_bounded(s, t, x) - w(t, x))) for t in (0.1, 1.0, 10.0, 100.0))
print(f"single mode vs explicit solution: max error {err:.2e}, K = {s.K}")

s = solve_bounded_a(spectral_state(Indicator(0.0, math.pi)), 1e3)
w = ExplicitSolution(s.mass0)
print(f"w = 1: initial mass {s.mass0:.6f} (pi with 64 modes), K = {s.K:.6f}")
for t in (10.0, 100.0, 1000.0):
    e = np.max(np.abs(evaluate_bounded(s, t, x) - w(t, x)))
    print(f"  t = {t:6.0f}   sup|w - w*| = {e:.3e}   times t^2 = {e * t * t:.4f}")
