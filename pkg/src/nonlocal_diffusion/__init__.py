"""Numerical tools for the diffusion equation ``u_t = (int u dx) u_xx`` on the half-line.

The diffusivity is the total mass, so the substitution ``a(t) = int_0^t M``
turns the problem into the heat equation in rescaled time. The package
solves for ``a(t)`` directly (:mod:`.mass_ode`), builds the solution from the
image kernel (:mod:`.kernel_solver`), checks it against explicit finite
differences (:mod:`.fd_solver`) and a sine-series solver on ``(0, pi)``
(:mod:`.spectral_bounded`), and measures convergence to the self-similar
attractor (:mod:`.profile`, :mod:`.diagnostics`).
"""

from .core import (AccuracyError, DensityField, DomainError, Grid1D, Indicator, InitialCondition,
                   MomentRecord, PowerTail, ScaledSine, SelfSimilarSeed, Tabulated, analytic_moments,
                   ic_from_json, ic_to_json, moments, sample_ic)
from .diagnostics import attractor_error, collapse, loglog_slope, phi_kernel_bound
from .fd_solver import FdConfig, StabilityError
from .fd_solver import run as run_fd
from .kernel_solver import KernelRun, evaluate
from .mass_ode import TimeRescaling, asymptotic_constants, solve_a
from .profile import AttractorParams, ProfileSpec, attractor, f_mu, kummer_1f1
from .spectral_bounded import ExplicitSolution, evaluate_bounded, solve_bounded_a, spectral_state

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "DensityField", "DomainError", "Grid1D", "Indicator", "InitialCondition",
    "MomentRecord", "PowerTail", "ScaledSine", "SelfSimilarSeed", "Tabulated", "analytic_moments",
    "ic_from_json", "ic_to_json", "moments", "sample_ic",
    "attractor_error", "collapse", "loglog_slope", "phi_kernel_bound",
    "FdConfig", "StabilityError", "run_fd", "KernelRun", "evaluate",
    "TimeRescaling", "asymptotic_constants", "solve_a",
    "AttractorParams", "ProfileSpec", "attractor", "f_mu", "kummer_1f1",
    "ExplicitSolution", "evaluate_bounded", "solve_bounded_a", "spectral_state",
]
