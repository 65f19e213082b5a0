"""Explicit finite differences with a lagged-mass diffusivity.

Each step uses the trapezoid mass of the previous time level as the
diffusion coefficient,

    u_j <- u_j + dt M_prev (u_{j+1} - 2 u_j + u_{j-1}) / dx^2,

with homogeneous Dirichlet values at both ends of ``[0, L]``. The scheme is
positive and mass-decreasing for ``dt <= dx^2 / (2 M(0))``; since the mass
only decreases, checking the initial mass is enough.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit

from .core import DensityField, DomainError, Grid1D, InitialCondition, moments, sample_ic, trapezoid

__all__ = ["StabilityError", "FdConfig", "FdState", "FdResult", "stability_bound", "initial_state", "step", "run"]


class StabilityError(DomainError):
    """Time step above the explicit stability limit."""

    def __init__(self, dt, max_dt):
        super().__init__(f"dt = {dt:.6g} exceeds the stability limit {max_dt:.6g}")
        self.dt = dt
        self.max_dt = max_dt


def stability_bound(mass: float, dx: float) -> float:
    """Largest stable step ``dx^2 / (2 M)``; infinite for zero mass."""
    return np.inf if mass <= 0 else dx * dx / (2.0 * mass)


@dataclass(frozen=True)
class FdConfig:
    grid: Grid1D
    t_end: float
    output_times: tuple = ()
    dt: Optional[float] = None
    theta: float = 0.9
    # extra times at which only moments are recorded
    moment_times: tuple = ()

    def __post_init__(self):
        if not (0 < self.theta <= 1):
            raise DomainError("theta must lie in (0, 1]")
        if not self.t_end > 0:
            raise DomainError("t_end must be positive")
        if self.dt is not None and not self.dt > 0:
            raise DomainError("dt must be positive")
        for t in (*self.output_times, *self.moment_times):
            if not (0 < t <= self.t_end):
                raise DomainError(f"output time {t} outside (0, {self.t_end}]")
        object.__setattr__(self, "output_times", tuple(sorted(float(t) for t in self.output_times)))
        object.__setattr__(self, "moment_times", tuple(sorted(float(t) for t in self.moment_times)))


@dataclass(frozen=True)
class FdState:
    field: DensityField
    mass: float
    steps: int = 0
    a: float = 0.0
    # cumulative mass and first moment carried out through x = L
    right_mass_loss: float = 0.0
    right_m1_loss: float = 0.0

    @property
    def t(self) -> float:
        return self.field.t


def initial_state(ic: InitialCondition, grid: Grid1D) -> FdState:
    u = np.array(sample_ic(ic, grid).values)
    u[0] = u[-1] = 0.0
    fld = DensityField(grid, u, 0.0)
    return FdState(fld, trapezoid(u, grid.spacing))


def step(state: FdState, dt: float) -> FdState:
    """One explicit step with the previous mass as diffusivity."""
    grid = state.field.grid
    dx = grid.spacing
    m = state.mass
    bound = stability_bound(m, dx)
    if dt > bound:
        raise StabilityError(dt, bound)
    u = state.field.values
    c = dt * m / (dx * dx)
    new = np.zeros_like(u)
    new[1:-1] = u[1:-1] + c * (u[2:] - 2.0 * u[1:-1] + u[:-2])
    flux = dt * m * u[-2] / dx
    return FdState(
        field=DensityField(grid, new, state.t + dt),
        mass=trapezoid(new, dx),
        steps=state.steps + 1,
        a=state.a + m * dt,
        right_mass_loss=state.right_mass_loss + flux,
        right_m1_loss=state.right_m1_loss + flux * grid.length,
    )


@njit(cache=True)
def _advance(u, nsteps, dt, dx, mass, length):
    n = u.size
    a_inc = 0.0
    loss = 0.0
    for _ in range(nsteps):
        c = dt * mass / (dx * dx)
        loss += dt * mass * u[n - 2] / dx
        a_inc += mass * dt
        prev = u[0]
        s = 0.0
        for j in range(1, n - 1):
            cur = u[j]
            new = cur + c * (u[j + 1] - 2.0 * cur + prev)
            u[j] = new
            prev = cur
            s += new
        mass = dx * s
    return mass, a_inc, loss


@dataclass
class FdResult:
    """Fields at the output times plus moment series and bookkeeping."""

    dt: float
    stability_bound: float
    initial: FdState
    outputs: list = field(default_factory=list)      # (DensityField, MomentRecord)
    states: list = field(default_factory=list)       # FdState at each output
    moment_series: list = field(default_factory=list)  # (MomentRecord, FdState) at every recorded time

    def __iter__(self):
        return iter(self.outputs)

    def __len__(self):
        return len(self.outputs)

    def __getitem__(self, i):
        return self.outputs[i]


def run(config: FdConfig, ic: InitialCondition) -> FdResult:
    """March the scheme to ``t_end``, snapping outputs to the nearest step."""
    grid = config.grid
    dx = grid.spacing
    state = initial_state(ic, grid)
    bound = stability_bound(state.mass, dx)
    dt = config.dt if config.dt is not None else config.theta * bound
    if dt > bound:
        raise StabilityError(dt, bound)
    if not np.isfinite(dt):
        # zero data: any step works, keep the output bookkeeping meaningful
        dt = config.theta * dx * dx / 2.0

    result = FdResult(dt=dt, stability_bound=bound, initial=state)
    events = {}
    for t in config.output_times:
        events.setdefault(int(round(t / dt)), set()).add("field")
    for t in config.moment_times:
        events.setdefault(int(round(t / dt)), set()).add("moments")
    n_end = int(round(config.t_end / dt))
    events.setdefault(n_end, set())

    u = np.array(state.field.values)
    mass, a, loss = state.mass, 0.0, 0.0
    done = 0
    for n in sorted(events):
        if n > done:
            mass, a_inc, loss_inc = _advance(u, n - done, dt, dx, mass, grid.length)
            a += a_inc
            loss += loss_inc
            done = n
        if not events[n]:
            continue
        fld = DensityField(grid, u.copy(), n * dt) if n > 0 else state.field
        st = FdState(fld, mass, n, a, loss, loss * grid.length)
        rec = moments(fld)
        result.moment_series.append((rec, st))
        if "field" in events[n]:
            result.outputs.append((fld, rec))
            result.states.append(st)
    return result
