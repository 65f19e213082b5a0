"""The scalar equation for the time rescaling ``a(t) = int_0^t M(s) ds``.

The mass at time ``t`` depends on the data only through ``a(t)``:

    M = M(0) - F(a),    F(a) = int_0^a G,
    G(a) = a^{-3/2} / (2 sqrt(pi)) * int_0^inf s exp(-s^2/(4a)) u_in(s) ds.

Exchanging the order of integration gives ``F(a) = int u_in(s) erfc(s / (2 sqrt(a))) ds``,
which is what is evaluated here (in closed form for indicator and
self-similar data, by quadrature otherwise). ``a`` itself solves the
autonomous first-order problem ``a' = M(0) - F(a)``, ``a(0) = 0``.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, interpolate

from .core import (AccuracyError, DomainError, Indicator, InitialCondition,
                   SelfSimilarSeed, analytic_moments)

__all__ = [
    "TimeRescaling",
    "AsymptoticConstants",
    "MassLaw",
    "mass_law",
    "G_of_a",
    "F_of_a",
    "solve_a",
    "tail_exponent_of_a",
    "asymptotic_constants",
]

SQRT_PI = math.sqrt(math.pi)
# Gaussian factor exp(-s^2/4a) drops below 1e-16 for s > sqrt(4a * GAUSS_CUT)
GAUSS_CUT = 16 * math.log(10)


def _quad_pieces(f, lo, hi, breaks=()):
    """Integrate ``f`` over ``[lo, hi]`` (``hi`` may be inf) in pieces."""
    pts = sorted({lo, *[b for b in breaks if lo < b < hi]} | ({hi} if math.isfinite(hi) else set()))
    total = 0.0
    with warnings.catch_warnings():
        # roundoff warnings fire once the pieces are already at machine precision
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for p, q in zip(pts[:-1], pts[1:]):
            total += integrate.quad(f, p, q, epsabs=0.0, epsrel=1e-12, limit=400)[0]
        if not math.isfinite(hi):
            total += integrate.quad(f, pts[-1], math.inf, epsabs=0.0, epsrel=1e-12, limit=400)[0]
    return total


class MassLaw:
    """``G``, ``F`` and the mass ``M(a)`` for one initial condition."""

    # log-spaced Hermite table used for data without closed forms
    TABLE_PER_DECADE = 32
    TABLE_LO = 1e-8

    def __init__(self, ic: InitialCondition):
        self.ic = ic
        hints = analytic_moments(ic)
        if hints is not None:
            self.mass0 = hints.mass
            self.m1 = hints.m1
        else:
            lo, hi = ic.support
            self.mass0 = _quad_pieces(lambda s: float(ic(s)), lo, hi, ic.breakpoints)
            self.m1 = _quad_pieces(lambda s: s * float(ic(s)), lo, hi, ic.breakpoints)
        self._closed = isinstance(ic, (Indicator, SelfSimilarSeed))
        self._table = None
        self._table_hi = 0.0

    # -- G -----------------------------------------------------------------
    def G(self, a: float) -> float:
        if a <= 0:
            raise DomainError(f"G(a) needs a > 0, got {a}")
        ic = self.ic
        if isinstance(ic, Indicator):
            p, q, h = ic.lo, ic.hi, ic.height
            return h * (math.exp(-p * p / (4 * a)) - math.exp(-q * q / (4 * a))) / math.sqrt(math.pi * a)
        if isinstance(ic, SelfSimilarSeed):
            return ic.m1 / (2 * SQRT_PI * (a + ic.a0) ** 1.5)
        return self._G_quad(a)

    def _G_quad(self, a):
        ic = self.ic
        lo, hi = ic.support
        cut = math.sqrt(4 * a * GAUSS_CUT)
        hi = min(hi, cut)
        if hi <= lo:
            return 0.0
        brk = list(ic.breakpoints) + [math.sqrt(2 * a)]
        val = _quad_pieces(lambda s: s * math.exp(-s * s / (4 * a)) * float(ic(s)), lo, hi, brk)
        return val / (2 * SQRT_PI * a**1.5)

    # -- F and M -------------------------------------------------------------
    def F(self, a: float) -> float:
        if a < 0:
            raise DomainError(f"F(a) needs a >= 0, got {a}")
        if a == 0:
            return 0.0
        ic = self.ic
        if isinstance(ic, Indicator):
            c = 2 * math.sqrt(a)
            def prim(s):  # antiderivative of erfc(s/c)
                return s * math.erfc(s / c) - c / SQRT_PI * math.exp(-(s / c) ** 2)
            return ic.height * (prim(ic.hi) - prim(ic.lo))
        if isinstance(ic, SelfSimilarSeed):
            return ic.m1 / SQRT_PI * (1 / math.sqrt(ic.a0) - 1 / math.sqrt(a + ic.a0))
        return self._F_quad(a)

    def _F_quad(self, a):
        ic = self.ic
        lo, hi = ic.support
        c = 2 * math.sqrt(a)
        hi = min(hi, c * math.sqrt(GAUSS_CUT))
        if hi <= lo:
            return 0.0
        return _quad_pieces(lambda s: float(ic(s)) * math.erfc(s / c), lo, hi, list(ic.breakpoints) + [c])

    def _M_quad(self, a):
        ic = self.ic
        lo, hi = ic.support
        c = 2 * math.sqrt(a)
        return _quad_pieces(lambda s: float(ic(s)) * math.erf(s / c), lo, hi,
                            list(ic.breakpoints) + [c, 4 * c])

    def mass_direct(self, a: float) -> float:
        """``M(0) - F(a)`` evaluated without any table."""
        if a <= 0:
            return self.mass0
        ic = self.ic
        if isinstance(ic, Indicator):
            p, q, h = ic.lo, ic.hi, ic.height
            c = 2 * math.sqrt(a)
            # antiderivative of erf(s/c) is s erf(s/c) + c/sqrt(pi) exp(-(s/c)^2)
            gauss = c / SQRT_PI * math.exp(-(p / c) ** 2) * math.expm1(-(q * q - p * p) / (c * c))
            return h * (q * math.erf(q / c) - p * math.erf(p / c) + gauss)
        if isinstance(ic, SelfSimilarSeed):
            return ic.m1 / (SQRT_PI * math.sqrt(a + ic.a0))
        F = self._F_quad(a)
        if F < 0.5 * self.mass0:
            return self.mass0 - F
        return self._M_quad(a)

    def _build_table(self, a_hi):
        lo = math.log10(self.TABLE_LO)
        hi = max(math.ceil(math.log10(a_hi)) + 1, lo + 1)
        n = int((hi - lo) * self.TABLE_PER_DECADE) + 1
        la = np.linspace(lo, hi, n) * math.log(10)
        a = np.exp(la)
        m = np.array([self.mass_direct(v) for v in a])
        g = np.array([self.G(v) for v in a])
        if np.any(m <= 0):
            raise AccuracyError("mass table hit a nonpositive value")
        # d log M / d log a = -a G / M
        self._table = interpolate.CubicHermiteSpline(la, np.log(m), -a * g / m)
        self._table_hi = float(a[-1])

    def mass(self, a: float) -> float:
        """``M(a) = M(0) - F(a)``; tabulated for data needing quadrature."""
        if self._closed or self.mass0 == 0.0:
            return self.mass_direct(a)
        if a < self.TABLE_LO:
            return self.mass_direct(a)
        if a > self._table_hi:
            self._build_table(max(a, 10 * self._table_hi, 1e6))
        return float(np.exp(self._table(math.log(a))))


@functools.lru_cache(maxsize=64)
def mass_law(ic: InitialCondition) -> MassLaw:
    return MassLaw(ic)


def G_of_a(ic: InitialCondition, a: float) -> float:
    """Boundary flux density ``G(a)``; equals ``du/dx(t, 0)`` when ``a = a(t)``."""
    return mass_law(ic).G(a)


def F_of_a(ic: InitialCondition, a: float) -> float:
    """``F(a) = int_0^a G``, the mass lost once the rescaled time reaches ``a``."""
    return mass_law(ic).F(a)


@dataclass(frozen=True)
class AsymptoticConstants:
    """Large-time law ``a ~ c t^{2/3}``, ``M ~ (2/3) c t^{-1/3}``."""

    m1: float
    c: float

    def a(self, t):
        return self.c * np.asarray(t, dtype=float) ** (2 / 3)

    def mass(self, t):
        return 2 / 3 * self.c * np.asarray(t, dtype=float) ** (-1 / 3)


def asymptotic_constants(m1: float) -> AsymptoticConstants:
    if not m1 > 0 or not math.isfinite(m1):
        raise DomainError("asymptotic constant needs a finite positive first moment")
    return AsymptoticConstants(m1, (3 * m1 / (2 * SQRT_PI)) ** (2 / 3))


@dataclass(frozen=True, eq=False)
class TimeRescaling:
    """Sampled ``a(t)`` and ``M(t) = a'(t)`` with Hermite dense output.

    ``domain`` is ``"half-line"`` for trajectories of the unbounded problem
    and ``"bounded"`` for the Dirichlet problem on ``(0, pi)``.
    """

    t: np.ndarray
    a: np.ndarray
    mass: np.ndarray
    mass0: float
    domain: str = "half-line"
    degenerate: bool = False
    ic: Optional[InitialCondition] = None
    _spline: object = field(default=None, repr=False)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        a = np.asarray(self.a, dtype=float)
        m = np.asarray(self.mass, dtype=float)
        if not (t.shape == a.shape == m.shape) or t.size < 2 or t[0] != 0.0:
            raise DomainError("rescaling samples must be equal-length arrays starting at t = 0")
        if a[0] != 0.0:
            raise DomainError("a(0) must be 0")
        for arr in (t, a, m):
            arr.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "mass", m)
        object.__setattr__(self, "_spline", interpolate.CubicHermiteSpline(t, a, m))

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.t_end * (1 + 1e-12)):
            raise DomainError(f"time outside the trajectory [0, {self.t_end}]")
        return np.minimum(t, self.t_end)

    def a_at(self, t):
        out = self._spline(self._check(t))
        return float(out) if np.ndim(out) == 0 else out

    def mass_at(self, t):
        out = self._spline.derivative()(self._check(t))
        return float(out) if np.ndim(out) == 0 else out


def solve_a(ic: InitialCondition, t_end: float, rtol: float = 1e-8, atol: float = 1e-12,
            samples_per_decade: int = 40, method: str = "DOP853") -> TimeRescaling:
    """Integrate ``a' = M(0) - F(a)`` from ``a(0) = 0`` up to ``t_end``.

    Uses an explicit embedded Runge-Kutta pair with adaptive steps. The
    returned samples are the accepted steps plus a log-spaced grid, with
    ``M`` evaluated from the mass law at each sampled ``a``.
    """
    if not t_end > 0:
        raise DomainError("t_end must be positive")
    law = mass_law(ic)
    if law.mass0 == 0.0:
        return TimeRescaling(np.array([0.0, t_end]), np.zeros(2), np.zeros(2), 0.0,
                             degenerate=True, ic=ic)
    if law.mass0 < 0:
        raise DomainError("initial mass must be nonnegative")

    def rhs(_t, y):
        return [law.mass(max(y[0], 0.0))]

    sol = integrate.solve_ivp(rhs, (0.0, t_end), [0.0], method=method, rtol=rtol, atol=atol,
                              dense_output=True)
    if not sol.success:
        raise AccuracyError(f"rescaling ODE failed: {sol.message}")
    t_lo = min(1e-3, t_end / 10) if t_end > 1e-3 else t_end / 10
    extra = np.geomspace(t_lo, t_end, max(int(samples_per_decade * math.log10(t_end / t_lo)), 2))
    ts = np.union1d(sol.t, extra)
    ts = ts[(ts >= 0) & (ts <= t_end)]
    ts[-1] = t_end
    a = sol.sol(ts)[0]
    a[0] = 0.0
    if np.any(np.diff(a) <= 0):
        raise AccuracyError("computed a(t) is not strictly increasing")
    m = np.array([law.mass(v) for v in a])
    return TimeRescaling(ts, a, m, law.mass0, ic=ic)


def tail_exponent_of_a(resc: TimeRescaling, window: tuple[float, float], n: int = 64) -> float:
    """Least-squares slope of ``log a`` against ``log t`` over ``window``."""
    if resc.domain != "half-line":
        raise DomainError("tail exponent is defined for half-line trajectories only")
    if resc.degenerate:
        raise DomainError("degenerate (zero-mass) trajectory")
    lo, hi = window
    if not (0 < lo < hi) or hi > resc.t_end * (1 + 1e-12):
        raise DomainError(f"window {window} not inside (0, {resc.t_end}]")
    if hi / lo < 10 * (1 - 1e-12):
        raise DomainError("fit window must span at least one decade")
    ts = np.geomspace(lo, hi, n)
    slope, _ = np.polyfit(np.log(ts), np.log(resc.a_at(ts)), 1)
    return float(slope)
