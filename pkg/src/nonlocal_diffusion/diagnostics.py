"""Decay-rate fits and convergence measurements against the attractor."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import interpolate

from .core import DensityField, DomainError
from .profile import AttractorParams, attractor

__all__ = [
    "SlopeFit",
    "CollapseReport",
    "loglog_slope",
    "collapse",
    "rescaled_profile",
    "attractor_error",
    "supnorm_ratio",
    "phi",
    "phi_kernel_bound",
]

SUP_CONST = math.sqrt(2 * math.e * math.pi)


@dataclass(frozen=True)
class SlopeFit:
    window: tuple
    slope: float
    intercept: float
    rms: float
    count: int


def loglog_slope(t, values, window: Optional[tuple] = None, min_samples: int = 10) -> SlopeFit:
    """Ordinary least squares of ``log value`` on ``log t`` inside ``window``."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape:
        raise DomainError("time and value series differ in length")
    if window is None:
        window = (float(t.min()), float(t.max()))
    lo, hi = window
    if not (0 < lo < hi) or hi / lo < 10 * (1 - 1e-12):
        raise DomainError(f"fit window {window} must be positive and span a decade")
    sel = (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))
    if sel.sum() < min_samples:
        raise DomainError(f"only {int(sel.sum())} samples in window {window}")
    if np.any(v[sel] <= 0):
        raise DomainError("log-log fit needs positive values")
    lt, lv = np.log(t[sel]), np.log(v[sel])
    # samples need not sit exactly on the window ends
    if lt.max() - lt.min() < 0.9 * math.log(10):
        raise DomainError("samples in the window span less than a decade")
    slope, intercept = np.polyfit(lt, lv, 1)
    rms = float(np.sqrt(np.mean((lv - (slope * lt + intercept)) ** 2)))
    return SlopeFit((lo, hi), float(slope), float(intercept), rms, int(sel.sum()))


@dataclass(frozen=True)
class CollapseReport:
    times: tuple
    distances: tuple
    exponent: float
    eta_max: float


def rescaled_profile(eta, m1: float):
    """Target ``(M1 / (2 sqrt(pi))) eta exp(-eta^2 / 4)`` in rescaled variables."""
    eta = np.asarray(eta, dtype=float)
    return m1 / (2 * math.sqrt(math.pi)) * eta * np.exp(-eta * eta / 4)


def _a_at(rescaling, t):
    if callable(rescaling):
        return float(rescaling(t))
    return float(rescaling.a_at(t))


def collapse(fields: Sequence[DensityField], rescaling, m1: float, eta_max: float = 10.0,
             n_eta: int = 2001, window: Optional[tuple] = None) -> CollapseReport:
    """Distance of ``a u(t, eta sqrt(a))`` from the rescaled attractor.

    ``rescaling`` is a ``TimeRescaling`` or any callable ``t -> a(t)``.
    Fields are interpolated onto the eta-grid with a monotone cubic; the
    grid is clipped where it would leave the computational domain.
    """
    if len(fields) < 3:
        raise DomainError("collapse needs fields at three or more times")
    times, dists = [], []
    for fld in fields:
        a = _a_at(rescaling, fld.t)
        if not a > 0:
            raise DomainError(f"a(t) = {a} is not positive at t = {fld.t}")
        top = min(eta_max, fld.grid.length / math.sqrt(a))
        eta = np.linspace(0.0, top, n_eta)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            # flat zero tails make the slope harmonic mean overflow harmlessly
            u = interpolate.PchipInterpolator(fld.grid.nodes, fld.values)(eta * math.sqrt(a))
        dists.append(float(np.max(np.abs(a * u - rescaled_profile(eta, m1)))))
        times.append(fld.t)
    t = np.array(times)
    d = np.array(dists)
    sel = np.ones_like(t, dtype=bool) if window is None else (t >= window[0] * (1 - 1e-9)) & (t <= window[1] * (1 + 1e-9))
    if sel.sum() >= 2 and np.all(d[sel] > 0):
        exponent = float(np.polyfit(np.log(t[sel]), np.log(d[sel]), 1)[0])
    else:
        exponent = math.nan
    return CollapseReport(tuple(times), tuple(dists), exponent, eta_max)


def attractor_error(fld: DensityField, rescaling, m1: float) -> float:
    """``sup_x |u(t, x) - attractor(x)|`` on the field's grid."""
    a = _a_at(rescaling, fld.t)
    ref = attractor(AttractorParams(m1, a), fld.grid.nodes)
    return float(np.max(np.abs(fld.values - ref)))


def supnorm_ratio(fld: DensityField, a: float, m1: float) -> float:
    """``max u`` divided by the bound ``M1 / (sqrt(2 e pi) a)``; at most 1 in theory."""
    if not math.isfinite(m1):
        return 0.0
    if a <= 0:
        return 0.0 if m1 > 0 else math.inf
    return float(np.max(fld.values)) * SUP_CONST * a / m1


def phi(X, Y):
    """Kernel remainder ``[e^{-(X-Y)^2/4} - e^{-(X+Y)^2/4}]/Y - X e^{-X^2/4}``, for ``Y > 0``."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    # 2 sinh form avoids cancellation as Y -> 0
    first = np.exp(-(X * X + Y * Y) / 4) * 2 * np.sinh(X * Y / 2) / Y
    return first - X * np.exp(-X * X / 4)


def phi_kernel_bound(X, Y) -> float:
    """``sup |phi(X, Y)| / Y`` over the tensor grid ``X x Y`` (``Y > 0``)."""
    X = np.asarray(X, dtype=float).ravel()
    Y = np.asarray(Y, dtype=float).ravel()
    if np.any(Y <= 0):
        raise DomainError("phi bound needs Y > 0")
    best = 0.0
    for s in range(0, Y.size, 512):
        y = Y[s:s + 512]
        vals = np.abs(phi(X[:, None], y[None, :])) / y[None, :]
        best = max(best, float(vals.max()))
    return best
