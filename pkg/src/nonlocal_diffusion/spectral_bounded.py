"""Sine-series solution of the Dirichlet problem on ``(0, pi)``.

Writing ``w(t, x) = sum_n w_n(t) sin(n x)``, every mode decays as
``w_n(0) exp(-n^2 a(t))`` and the mass ``M = sum_{n odd} 2 w_n / n`` closes
the scalar equation ``a' = sum_{n odd} (2 w_n(0) / n) exp(-n^2 a)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy import integrate

from .core import (AccuracyError, DensityField, DomainError, Grid1D, Indicator, InitialCondition,
                   ScaledSine)
from .mass_ode import TimeRescaling

__all__ = [
    "SpectralState",
    "ExplicitSolution",
    "fourier_coefficients",
    "spectral_state",
    "solve_bounded_a",
    "evaluate_bounded",
    "compute_K",
    "truncation_bound",
]

N_MODES = 64


@dataclass(frozen=True)
class ExplicitSolution:
    """``w*(t, x) = (M/2) sin x / (1 + M t)`` where ``M`` is the initial mass."""

    mass: float

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError("explicit solution needs a positive mass")

    def __call__(self, t, x):
        return 0.5 * self.mass * np.sin(x) / (1.0 + self.mass * np.asarray(t, dtype=float))

    def mass_at(self, t):
        return self.mass / (1.0 + self.mass * np.asarray(t, dtype=float))


def fourier_coefficients(w_in: Union[InitialCondition, Callable], n_modes: int = N_MODES) -> np.ndarray:
    """``w_n(0) = (2/pi) int_0^pi w_in(x) sin(n x) dx`` for ``n = 1..n_modes``.

    Closed forms for :class:`ScaledSine` and :class:`Indicator` data (restricted to
    ``(0, pi)``); anything else callable goes through oscillatory quadrature.
    """
    if int(n_modes) != n_modes or n_modes < 1:
        raise DomainError("need at least one mode")
    n = np.arange(1, int(n_modes) + 1)
    if isinstance(w_in, ScaledSine):
        out = np.zeros(n.size)
        out[0] = 0.5 * w_in.mass
        return out
    if isinstance(w_in, Indicator):
        p, q = min(w_in.lo, math.pi), min(w_in.hi, math.pi)
        return 2.0 * w_in.height / (math.pi * n) * (np.cos(n * p) - np.cos(n * q))
    # split at the data's kinks; weighted (QAWO) rules can step over a jump entirely
    brk = getattr(w_in, "breakpoints", ())
    edges = sorted({0.0, math.pi, *[float(b) for b in brk if 0.0 < b < math.pi]})
    out = np.empty(n.size)
    with warnings.catch_warnings():
        # vanishing coefficients trigger roundoff warnings at the absolute floor
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for i, k in enumerate(n):
            val = sum(integrate.quad(lambda x: float(w_in(x)) * math.sin(k * x), p, q,
                                     epsabs=1e-15, epsrel=1e-13, limit=400)[0]
                      for p, q in zip(edges[:-1], edges[1:]))
            out[i] = 2.0 / math.pi * val
    return out


@dataclass(frozen=True, eq=False)
class SpectralState:
    coeffs: np.ndarray
    rescaling: TimeRescaling = None
    K: float = math.nan

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n_modes(self) -> int:
        return self.coeffs.size

    @property
    def mass0(self) -> float:
        return _mass_weights(self.coeffs).sum()


def _mass_weights(coeffs):
    n = np.arange(1, coeffs.size + 1)
    return np.where(n % 2 == 1, 2.0 * coeffs / n, 0.0)


def spectral_state(w_in, n_modes: int = N_MODES) -> SpectralState:
    return SpectralState(fourier_coefficients(w_in, n_modes))


def solve_bounded_a(state: SpectralState, t_end: float, rtol: float = 1e-12, atol: float = 1e-14,
                    samples_per_decade: int = 400) -> SpectralState:
    """Integrate ``a' = sum_{n odd} (2 w_n(0)/n) exp(-n^2 a)`` from ``a(0) = 0``.

    Returns a new state carrying the trajectory (as a bounded-domain
    :class:`TimeRescaling`) and the constant ``K`` when ``w_1(0) > 0``.
    """
    if not t_end > 0:
        raise DomainError("t_end must be positive")
    weights = _mass_weights(state.coeffs)
    m0 = weights.sum()
    if not m0 > 0:
        raise DomainError("bounded problem needs positive initial mass")
    n2 = np.arange(1, state.n_modes + 1, dtype=float) ** 2

    def mass_of(a):
        return float(np.dot(weights, np.exp(-n2 * a)))

    sol = integrate.solve_ivp(lambda _t, y: [mass_of(y[0])], (0.0, t_end), [0.0], method="DOP853",
                              rtol=rtol, atol=atol, dense_output=True)
    if not sol.success:
        raise AccuracyError(f"bounded rescaling ODE failed: {sol.message}")
    t_lo = min(1e-3, t_end / 10)
    extra = np.geomspace(t_lo, t_end, max(int(samples_per_decade * math.log10(t_end / t_lo)), 2))
    ts = np.union1d(sol.t, extra)
    ts[-1] = t_end
    a = sol.sol(ts)[0]
    a[0] = 0.0
    m = np.array([mass_of(v) for v in a])
    resc = TimeRescaling(ts, a, m, m0, domain="bounded")
    K = compute_K(state) if state.coeffs[0] > 0 else math.nan
    return SpectralState(state.coeffs, resc, K)


def evaluate_bounded(state: SpectralState, t: float, x) -> DensityField | np.ndarray:
    """``sum_n w_n(0) exp(-n^2 a(t)) sin(n x)``.

    ``x`` may be a :class:`Grid1D` on ``[0, pi]`` (returns a field) or an array.
    """
    if state.rescaling is None:
        raise DomainError("solve_bounded_a must be called first")
    a = state.rescaling.a_at(t) if t > 0 else 0.0
    grid = x if isinstance(x, Grid1D) else None
    xs = grid.nodes if grid is not None else np.asarray(x, dtype=float)
    n = np.arange(1, state.n_modes + 1, dtype=float)
    amp = state.coeffs * np.exp(-n * n * a)
    vals = np.sin(np.multiply.outer(xs, n)) @ amp
    if grid is None:
        return vals
    if abs(grid.length - math.pi) > 1e-12:
        raise DomainError("bounded solver lives on [0, pi]")
    vals = np.array(vals)
    vals[0] = 0.0
    vals[-1] = 0.0
    scale = np.max(np.abs(vals)) if vals.size else 0.0
    vals[(vals < 0) & (vals > -1e-12 * scale)] = 0.0
    return DensityField(grid, vals, t)


def truncation_bound(state: SpectralState, t: float) -> float:
    """Bound on the discarded tail ``sum_{n > N} |w_n(t)|`` of the series.

    Uses ``|w_n(0)| <= max_k |w_k(0)|`` (coefficients of bounded data do not grow)
    and a geometric bound on ``exp(-n^2 a)`` beyond ``N``.
    """
    a = state.rescaling.a_at(t) if t > 0 else 0.0
    n = state.n_modes + 1
    if a <= 0:
        return math.inf
    cmax = float(np.max(np.abs(state.coeffs)))
    first = math.exp(-n * n * a)
    ratio = math.exp(-(2 * n + 1) * a)
    return cmax * first / (1.0 - ratio)


def compute_K(state: SpectralState) -> float:
    """Offset ``K`` in the large-time law ``a(t) ~ log(2 w_1(0) (t + K))``."""
    w1 = float(state.coeffs[0])
    if not w1 > 0:
        raise DomainError("K requires w_1(0) > 0")
    n = np.arange(1, state.n_modes + 1)
    odd = (n % 2 == 1) & (n >= 3)
    r = state.coeffs[odd] / (n[odd] * w1)
    n2 = n[odd].astype(float) ** 2
    if r.size == 0 or not np.any(r):
        return 1.0 / (2 * w1)

    def integrand(a):
        num = np.dot(r, np.exp((2.0 - n2) * a))
        den = 1.0 + np.dot(r, np.exp((1.0 - n2) * a))
        return num / den

    # integrand decays like exp(-7a)
    a_max = 16 * math.log(10) / 7
    pts = [1.0 / float(k) for k in (n2[-1], 100.0, 10.0) if 1.0 / k < a_max]
    val = integrate.quad(integrand, 0.0, a_max, points=sorted(pts), epsabs=1e-15, epsrel=1e-12, limit=400)[0]
    return (1.0 + val) / (2 * w1)
