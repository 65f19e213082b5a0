"""Grids, initial data, sampled density fields and their moments.

Every solver in the package consumes the types defined here. Initial
conditions are small frozen dataclasses that can be evaluated pointwise
and, for the built-in shapes, report their moments in closed form.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, ClassVar, Optional

import numpy as np

__all__ = [
    "DomainError",
    "AccuracyError",
    "Grid1D",
    "InitialCondition",
    "Indicator",
    "ScaledSine",
    "PowerTail",
    "SelfSimilarSeed",
    "Tabulated",
    "DensityField",
    "MomentRecord",
    "NEG_TOL",
    "sample_ic",
    "moments",
    "analytic_moments",
    "ic_from_json",
    "ic_to_json",
    "trapezoid",
]

# relative negativity tolerance for computed fields
NEG_TOL = 1e-12


class DomainError(ValueError):
    """Argument outside the domain where an operation is defined."""


class AccuracyError(ArithmeticError):
    """A numerical method failed to reach its requested tolerance."""


def trapezoid(y, dx: float) -> float:
    """Composite trapezoid rule on a uniform mesh."""
    y = np.asarray(y, dtype=float)
    if y.size < 2:
        return 0.0
    return float(dx * (y.sum() - 0.5 * (y[0] + y[-1])))


@dataclass(frozen=True)
class Grid1D:
    """Uniform mesh on ``[0, length]`` with ``node_count`` nodes."""

    length: float
    node_count: int

    def __post_init__(self):
        if not (self.length > 0 and math.isfinite(self.length)):
            raise DomainError(f"grid length must be positive, got {self.length}")
        if int(self.node_count) != self.node_count or self.node_count < 3:
            raise DomainError(f"need at least 3 nodes, got {self.node_count}")
        object.__setattr__(self, "node_count", int(self.node_count))

    @classmethod
    def from_spacing(cls, length: float, dx: float) -> "Grid1D":
        n = int(round(length / dx))
        if abs(n * dx - length) > 1e-9 * length:
            raise DomainError(f"spacing {dx} does not divide length {length}")
        return cls(length, n + 1)

    @property
    def spacing(self) -> float:
        return self.length / (self.node_count - 1)

    @property
    def nodes(self) -> np.ndarray:
        x = np.linspace(0.0, self.length, self.node_count)
        x.setflags(write=False)
        return x


# ---------------------------------------------------------------------------
# initial conditions
# ---------------------------------------------------------------------------


class InitialCondition:
    """Base class for initial data ``u_in(x)`` on the half-line.

    Subclasses implement ``__call__`` (vectorised evaluation), ``support``
    (an interval outside which the data vanish, ``inf`` allowed) and
    ``breakpoints`` (interior points where the data are not smooth).
    """

    variant: ClassVar[str] = ""

    def __call__(self, x):
        raise NotImplementedError

    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return ()

    def params(self) -> dict[str, Any]:
        raise NotImplementedError

    def to_json(self) -> dict[str, Any]:
        return {"variant": self.variant, "params": self.params()}


@dataclass(frozen=True)
class Indicator(InitialCondition):
    """``height`` times the indicator of the closed interval ``[lo, hi]``."""

    lo: float
    hi: float
    height: float = 1.0
    variant: ClassVar[str] = "Indicator"

    def __post_init__(self):
        if not (0 <= self.lo < self.hi):
            raise DomainError(f"Indicator needs 0 <= lo < hi, got ({self.lo}, {self.hi})")
        if self.height < 0:
            raise DomainError("Indicator height must be nonnegative")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.lo) & (x <= self.hi), self.height, 0.0)

    @property
    def support(self):
        return (self.lo, self.hi)

    def params(self):
        return {"lo": self.lo, "hi": self.hi, "height": self.height}


@dataclass(frozen=True)
class ScaledSine(InitialCondition):
    """``(mass/2) sin x`` on ``(0, pi)``, zero beyond; total mass ``mass``."""

    mass: float
    variant: ClassVar[str] = "ScaledSine"

    def __post_init__(self):
        if self.mass < 0:
            raise DomainError("ScaledSine mass must be nonnegative")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= 0) & (x <= np.pi)
        return np.where(inside, 0.5 * self.mass * np.sin(np.clip(x, 0, np.pi)), 0.0)

    @property
    def support(self):
        return (0.0, math.pi)

    def params(self):
        return {"mass": self.mass}


@dataclass(frozen=True)
class PowerTail(InitialCondition):
    """``x (1+x)^(-delta-1)``: linear at the origin, tail ``O(x^-delta)``.

    For ``1 < delta < 2`` the mass is finite but the first moment is not.
    """

    delta: float
    variant: ClassVar[str] = "PowerTail"

    def __post_init__(self):
        if not (1 < self.delta < 2):
            raise DomainError(f"PowerTail requires 1 < delta < 2, got {self.delta}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        xp = np.maximum(x, 0.0)
        return np.where(x >= 0, xp * (1.0 + xp) ** (-self.delta - 1.0), 0.0)

    @property
    def support(self):
        return (0.0, math.inf)

    def params(self):
        return {"delta": self.delta}


@dataclass(frozen=True)
class SelfSimilarSeed(InitialCondition):
    """The attractor profile taken at rescaled time ``a0``.

    ``u_in(x) = M1 x / (2 sqrt(pi) a0^{3/2}) exp(-x^2 / (4 a0))``. Under the
    flow it stays in the family with ``a0`` replaced by ``a0 + a(t)``.
    """

    m1: float
    a0: float = 1.0
    variant: ClassVar[str] = "SelfSimilarSeed"

    def __post_init__(self):
        if self.m1 < 0 or self.a0 <= 0:
            raise DomainError("SelfSimilarSeed needs m1 >= 0 and a0 > 0")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        val = self.m1 * x / (2 * math.sqrt(math.pi) * self.a0**1.5) * np.exp(-x * x / (4 * self.a0))
        return np.where(x >= 0, val, 0.0)

    @property
    def support(self):
        return (0.0, math.inf)

    def params(self):
        return {"m1": self.m1, "a0": self.a0}


@dataclass(frozen=True, eq=False)
class Tabulated(InitialCondition):
    """Samples of ``u_in``, linearly interpolated and zero outside.

    With ``x=None`` the samples are taken to live on the nodes of whatever
    grid they are sampled on, so the lengths must match there.
    """

    values: tuple
    x: Optional[tuple] = None
    variant: ClassVar[str] = "Tabulated"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise DomainError("Tabulated needs a nonempty 1-D sample array")
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise DomainError("Tabulated values must be finite and nonnegative")
        object.__setattr__(self, "values", tuple(float(v) for v in vals))
        if self.x is not None:
            xs = np.asarray(self.x, dtype=float)
            if xs.shape != vals.shape or np.any(np.diff(xs) <= 0) or xs[0] < 0:
                raise DomainError("Tabulated x must be increasing, nonnegative, same length as values")
            object.__setattr__(self, "x", tuple(float(v) for v in xs))
            object.__setattr__(self, "_xs", np.array(self.x))
        object.__setattr__(self, "_vs", np.array(self.values))

    def __eq__(self, other):
        return isinstance(other, Tabulated) and self.values == other.values and self.x == other.x

    def __hash__(self):
        return hash((self.values, self.x))

    def _require_x(self):
        if self.x is None:
            raise DomainError("Tabulated data without x can only be sampled on a matching grid")
        return self._xs

    def __call__(self, x):
        xs = self._require_x()
        return np.interp(np.asarray(x, dtype=float), xs, self._vs, left=0.0, right=0.0)

    def _live(self):
        # index range whose linear interpolant can be nonzero
        nz = np.flatnonzero(self._vs)
        if nz.size == 0:
            return 0, 0
        return max(int(nz[0]) - 1, 0), min(int(nz[-1]) + 1, len(self.values) - 1)

    @property
    def support(self):
        xs = self._require_x()
        i, j = self._live()
        return (float(xs[i]), float(xs[j]))

    @property
    def breakpoints(self):
        if self.x is None:
            return ()
        i, j = self._live()
        return self.x[i + 1:j]

    def params(self):
        out = {"values": list(self.values)}
        if self.x is not None:
            out["x"] = list(self.x)
        return out


_VARIANTS = {cls.variant: cls for cls in (Indicator, ScaledSine, PowerTail, SelfSimilarSeed, Tabulated)}


def ic_from_json(obj) -> InitialCondition:
    """Build an initial condition from ``{"variant": ..., "params": {...}}``.

    A JSON string is accepted as well as an already-decoded mapping.
    """
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "variant" not in obj:
        raise DomainError("initial condition must be an object with a 'variant' key")
    try:
        cls = _VARIANTS[obj["variant"]]
    except KeyError:
        raise DomainError(f"unknown initial-condition variant {obj['variant']!r}") from None
    params = dict(obj.get("params", {}))
    if cls is Tabulated:
        params["values"] = tuple(params.get("values", ()))
        if params.get("x") is not None:
            params["x"] = tuple(params["x"])
    try:
        return cls(**params)
    except TypeError as exc:
        raise DomainError(f"bad parameters for {cls.variant}: {exc}") from None


def ic_to_json(ic: InitialCondition) -> dict[str, Any]:
    return ic.to_json()


# ---------------------------------------------------------------------------
# fields and moments
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DensityField:
    """Samples ``u(t, x_j)`` on a grid at a single time ``t``."""

    grid: Grid1D
    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        u = np.array(self.values, dtype=float)
        if u.shape != (self.grid.node_count,):
            raise DomainError(f"field has {u.shape} values for {self.grid.node_count} nodes")
        if self.t < 0:
            raise DomainError("field time must be nonnegative")
        scale = float(np.max(np.abs(u))) if u.size else 0.0
        if u.size and u.min() < -NEG_TOL * scale:
            raise DomainError(f"field has negative values down to {u.min():.3e}")
        if self.t > 0 and u[0] != 0.0:
            raise DomainError("Dirichlet condition u(t, 0) = 0 violated")
        u.setflags(write=False)
        object.__setattr__(self, "values", u)

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes


@dataclass(frozen=True)
class MomentRecord:
    t: float
    mass: float
    m1: float
    m2: float
    supnorm: float


def sample_ic(ic: InitialCondition, grid: Grid1D) -> DensityField:
    """Pointwise evaluation of the initial data at the grid nodes."""
    if isinstance(ic, Tabulated) and ic.x is None:
        if len(ic.values) != grid.node_count:
            raise DomainError("tabulated samples do not match the grid node count")
        vals = np.asarray(ic.values)
    else:
        vals = ic(grid.nodes)
    return DensityField(grid, vals, 0.0)


def moments(fld: DensityField) -> MomentRecord:
    """Mass, first and second moments by the trapezoid rule, plus sup-norm."""
    x = fld.grid.nodes
    u = fld.values
    dx = fld.grid.spacing
    return MomentRecord(
        t=fld.t,
        mass=trapezoid(u, dx),
        m1=trapezoid(x * u, dx),
        m2=trapezoid(x * x * u, dx),
        supnorm=float(np.max(np.abs(u))),
    )


def analytic_moments(ic: InitialCondition) -> Optional[MomentRecord]:
    """Closed-form ``M(0), M1(0), M2(0)`` and sup-norm, when known.

    Returns ``None`` for tabulated data. For :class:`PowerTail` the first and
    second moments diverge and are reported as ``math.inf``.
    """
    if isinstance(ic, Indicator):
        a, b, h = ic.lo, ic.hi, ic.height
        return MomentRecord(0.0, h * (b - a), h * (b * b - a * a) / 2, h * (b**3 - a**3) / 3, h)
    if isinstance(ic, ScaledSine):
        m = ic.mass
        return MomentRecord(0.0, m, m * math.pi / 2, m * (math.pi**2 - 4) / 2, m / 2)
    if isinstance(ic, PowerTail):
        d = ic.delta
        xs = 1.0 / d
        return MomentRecord(0.0, 1.0 / (d * (d - 1)), math.inf, math.inf, xs * (1 + xs) ** (-d - 1))
    if isinstance(ic, SelfSimilarSeed):
        m1, a0 = ic.m1, ic.a0
        rp = math.sqrt(math.pi)
        return MomentRecord(0.0, m1 / (rp * math.sqrt(a0)), m1, 4 * m1 * math.sqrt(a0) / rp,
                            m1 / (math.sqrt(2 * math.e * math.pi) * a0))
    return None
