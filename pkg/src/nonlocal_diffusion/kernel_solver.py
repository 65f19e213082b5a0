"""Half-line solution by the method of images.

With ``a = a(t)`` taken from :mod:`nonlocal_diffusion.mass_ode`,

    u(t, x) = (4 pi a)^{-1/2} int_0^inf u_in(y) [exp(-(x-y)^2/4a) - exp(-(x+y)^2/4a)] dy.

The ``y`` integral is done with composite Gauss-Legendre panels whose
edges include every non-smooth point of the data, restricted for each
``x`` to the window ``|x - y| <= kappa sqrt(4a)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DensityField, DomainError, Grid1D, InitialCondition, trapezoid
from .mass_ode import TimeRescaling, mass_law

__all__ = ["KernelRun", "evaluate", "evaluate_at", "flux_at_origin", "self_consistency_residual"]

_CHUNK = 256


@dataclass(frozen=True, eq=False)
class KernelRun:
    ic: InitialCondition
    rescaling: TimeRescaling
    grid: Grid1D
    nodes_per_panel: int = 64
    kappa: float = 8.0

    def __post_init__(self):
        m0 = mass_law(self.ic).mass0
        if abs(self.rescaling.mass0 - m0) > 1e-10 * max(1.0, abs(m0)):
            raise DomainError("rescaling was not produced from this initial condition")
        if self.rescaling.domain != "half-line":
            raise DomainError("kernel solver needs a half-line rescaling")


def _panels(ic, lo, hi, width):
    """Panel edges covering ``[lo, hi]`` with breakpoints of the data as edges."""
    fixed = sorted({lo, hi, *[b for b in ic.breakpoints if lo < b < hi]})
    edges = [fixed[0]]
    for p, q in zip(fixed[:-1], fixed[1:]):
        n = max(1, math.ceil((q - p) / width))
        edges.extend(np.linspace(p, q, n + 1)[1:])
    return np.asarray(edges)


def _a_of(run, t):
    if not t > 0:
        raise DomainError("evaluation time must be positive")
    return run.rescaling.a_at(t)


def evaluate_at(run: KernelRun, t: float, x) -> np.ndarray:
    """Kernel representation at arbitrary points ``x >= 0``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    a = _a_of(run, t)
    out = np.zeros_like(x)
    if run.rescaling.degenerate or a <= 0:
        return out
    ic = run.ic
    s4a = math.sqrt(4 * a)
    w = run.kappa * s4a
    lo, hi = ic.support
    hi = min(hi, float(x.max()) + w)
    lo = max(lo, float(x.min()) - w, 0.0)
    if hi <= lo:
        return out
    edges = _panels(ic, lo, hi, s4a)
    centres = 0.5 * (edges[1:] + edges[:-1])
    halves = 0.5 * (edges[1:] - edges[:-1])
    gx, gw = np.polynomial.legendre.leggauss(run.nodes_per_panel)

    first = np.clip(np.searchsorted(edges, x - w, side="right") - 1, 0, len(centres) - 1)
    last = np.clip(np.searchsorted(edges, x + w, side="left"), 1, len(centres))
    count = int(np.max(last - first))
    norm = 1.0 / math.sqrt(4 * math.pi * a)
    for s in range(0, x.size, _CHUNK):
        xs = x[s:s + _CHUNK]
        k = first[s:s + _CHUNK, None] + np.arange(count)[None, :]
        valid = k < last[s:s + _CHUNK, None]
        k = np.minimum(k, len(centres) - 1)
        y = centres[k][..., None] + halves[k][..., None] * gx
        wy = (halves[k] * valid)[..., None] * gw
        xx = xs[:, None, None]
        ker = np.exp(-(xx - y) ** 2 / (4 * a)) - np.exp(-(xx + y) ** 2 / (4 * a))
        out[s:s + _CHUNK] = norm * np.sum(wy * ker * ic(y), axis=(1, 2))
    out[x == 0] = 0.0
    return out


def evaluate(run: KernelRun, t: float) -> DensityField:
    """``u(t, .)`` on the run's grid."""
    vals = evaluate_at(run, t, run.grid.nodes)
    vals = np.maximum(vals, 0.0) if np.all(vals >= -1e-12 * max(np.max(np.abs(vals)), 1e-300)) else vals
    return DensityField(run.grid, vals, t)


def flux_at_origin(run: KernelRun, t: float) -> float:
    """``du/dx(t, 0)``, which is also the relative mass loss rate ``-M'/M``."""
    a = _a_of(run, t)
    if run.rescaling.degenerate or a <= 0:
        return 0.0
    ic = run.ic
    lo, hi = ic.support
    hi = min(hi, run.kappa * math.sqrt(4 * a))
    if hi <= lo:
        return 0.0
    edges = _panels(ic, lo, hi, math.sqrt(4 * a))
    gx, gw = np.polynomial.legendre.leggauss(run.nodes_per_panel)
    c = 0.5 * (edges[1:] + edges[:-1])
    h = 0.5 * (edges[1:] - edges[:-1])
    y = c[:, None] + h[:, None] * gx
    integrand = y * np.exp(-y * y / (4 * a)) * ic(y)
    return float(np.sum(h[:, None] * gw * integrand) / (2 * math.sqrt(math.pi) * a**1.5))


def self_consistency_residual(run: KernelRun, times) -> float:
    """Largest relative gap between the field's quadrature mass and ``M(t)``."""
    if run.rescaling.degenerate:
        return 0.0
    worst = 0.0
    for t in np.atleast_1d(times):
        fld = evaluate(run, float(t))
        m_field = trapezoid(fld.values, run.grid.spacing)
        m_ode = run.rescaling.mass_at(float(t))
        worst = max(worst, abs(m_field - m_ode) / m_ode)
    return worst
