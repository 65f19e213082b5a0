"""Command-line entry point: ``nonlocal-diffusion {simulate,mass-ode,diagnose,profile}``.

Every run is driven by a :class:`RunConfig`; flags mirror its fields and a
``--config`` JSON file overrides them. Outputs are CSV files written at full
double precision plus a JSON manifest that echoes the config.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from importlib import metadata
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import interpolate

from . import diagnostics, fd_solver, kernel_solver, mass_ode, spectral_bounded
from .core import (AccuracyError, DensityField, DomainError, Grid1D, analytic_moments, ic_from_json,
                   moments)
from .profile import ProfileSpec, f_mu

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
SOLVERS = ("fd", "kernel", "spectral")


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:  # pragma: no cover
        return "unknown"


@dataclass
class RunConfig:
    """Everything needed to reproduce a ``simulate`` run."""

    solver: str
    ic: dict
    t_end: float
    L: float = 400.0
    nx: int = 4001
    outputs: tuple = ()
    theta: float = 0.9
    dt: Optional[float] = None
    rtol: float = 1e-8
    atol: float = 1e-12
    modes: int = 64
    quad_nodes: int = 64
    moment_samples: int = 20
    moment_t0: float = 1.0
    out: str = "run"
    label: str = "run"

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise DomainError(f"solver must be one of {SOLVERS}")
        if not isinstance(self.ic, dict):
            raise DomainError("ic must be a JSON object")
        ic_from_json(self.ic)  # validate early
        self.t_end = float(self.t_end)
        if not self.t_end > 0:
            raise DomainError("t_end must be positive")
        self.outputs = tuple(sorted(float(t) for t in self.outputs))
        for t in self.outputs:
            if not (0 < t <= self.t_end):
                raise DomainError(f"output time {t} outside (0, {self.t_end}]")
        if self.solver == "spectral":
            self.L = math.pi
        if not self.L > 0:
            raise DomainError("L must be positive")
        if int(self.nx) != self.nx or self.nx < 3:
            raise DomainError("nx must be an integer >= 3")
        self.nx = int(self.nx)
        if not (0 < self.theta <= 1):
            raise DomainError("theta must lie in (0, 1]")
        if self.dt is not None and not self.dt > 0:
            raise DomainError("dt must be positive")
        if not (self.rtol > 0 and self.atol > 0):
            raise DomainError("tolerances must be positive")
        if self.modes < 1 or self.quad_nodes < 2 or self.moment_samples < 1:
            raise DomainError("modes, quad_nodes and moment_samples must be positive")
        if not self.moment_t0 > 0:
            raise DomainError("moment_t0 must be positive")

    def to_json(self) -> dict:
        d = asdict(self)
        d["outputs"] = list(self.outputs)
        return d

    @classmethod
    def from_json(cls, obj: dict) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(obj) - names
        if unknown:
            raise DomainError(f"unknown config fields {sorted(unknown)}")
        missing = [n for n in ("solver", "ic", "t_end") if obj.get(n) is None]
        if missing:
            raise DomainError(f"missing config fields {missing}")
        return cls(**obj)


@dataclass
class RunManifest:
    config: dict
    derived: dict
    version: str
    wall_clock_s: float
    profiles: list = field(default_factory=list)
    files: dict = field(default_factory=dict)


# --- CSV helpers ---------------------------------------------------------------

def write_csv(path: Path, header: tuple, columns) -> None:
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header=",".join(header), comments="")


def read_csv(path, required: tuple) -> dict:
    """Columns of a headered numeric CSV; raises :class:`DomainError` when malformed."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise DomainError(f"{path} is empty")
    head = [h.strip() for h in rows[0]]
    missing = [c for c in required if c not in head]
    if missing:
        raise DomainError(f"{path} lacks columns {missing}")
    try:
        body = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise DomainError(f"{path}: {exc}") from None
    if body.ndim != 2 or body.shape[0] == 0 or body.shape[1] != len(head):
        raise DomainError(f"{path} has ragged or empty rows")
    return {h: body[:, i] for i, h in enumerate(head)}


def _fmt_t(t: float) -> str:
    return repr(float(t)).replace("+", "")


# --- simulate -------------------------------------------------------------------

def _moment_times(cfg: RunConfig) -> np.ndarray:
    t0 = min(cfg.moment_t0, cfg.t_end)
    n = max(int(math.ceil(cfg.moment_samples * math.log10(cfg.t_end / t0))), 1) + 1
    return np.union1d(np.geomspace(t0, cfg.t_end, n), np.asarray(cfg.outputs, dtype=float))


def _simulate_fd(cfg, ic, grid):
    mt = _moment_times(cfg)
    fc = fd_solver.FdConfig(grid, cfg.t_end, cfg.outputs, cfg.dt, cfg.theta, tuple(mt))
    res = fd_solver.run(fc, ic)
    profiles = [fld for fld, _ in res.outputs]
    mom = [rec for rec, _ in res.moment_series]
    series = [(st.t, st.a, st.mass) for _, st in res.moment_series]
    derived = {"dt": res.dt, "theta": cfg.theta, "stability_bound": res.stability_bound,
               "steps": int(round(cfg.t_end / res.dt)),
               "right_mass_loss": res.moment_series[-1][1].right_mass_loss if res.moment_series else 0.0}
    return profiles, mom, series, derived


def _simulate_kernel(cfg, ic, grid):
    resc = mass_ode.solve_a(ic, cfg.t_end, rtol=cfg.rtol, atol=cfg.atol)
    run = kernel_solver.KernelRun(ic, resc, grid, nodes_per_panel=cfg.quad_nodes)
    profiles = [kernel_solver.evaluate(run, t) for t in cfg.outputs]
    mt = _moment_times(cfg)
    mom = [moments(kernel_solver.evaluate(run, float(t))) for t in mt]
    series = [(float(t), float(resc.a_at(t)), float(resc.mass_at(t))) for t in mt]
    return profiles, mom, series, {}


def _simulate_spectral(cfg, ic, grid):
    st = spectral_bounded.solve_bounded_a(spectral_bounded.spectral_state(ic, cfg.modes), cfg.t_end)
    profiles = [spectral_bounded.evaluate_bounded(st, t, grid) for t in cfg.outputs]
    mt = _moment_times(cfg)
    mom = [moments(spectral_bounded.evaluate_bounded(st, float(t), grid)) for t in mt]
    r = st.rescaling
    series = [(float(t), float(r.a_at(t)), float(r.mass_at(t))) for t in mt]
    K = None if math.isnan(st.K) else st.K
    return profiles, mom, series, {"K": K, "modes": cfg.modes, "mass0_series": st.mass0}


def simulate(cfg: RunConfig) -> RunManifest:
    start = time.perf_counter()
    ic = ic_from_json(cfg.ic)
    grid = Grid1D(cfg.L, cfg.nx)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    runner = {"fd": _simulate_fd, "kernel": _simulate_kernel, "spectral": _simulate_spectral}[cfg.solver]
    profiles, mom, series, derived = runner(cfg, ic, grid)

    entries = []
    for fld in profiles:
        name = f"profile_t{_fmt_t(fld.t)}.csv"
        write_csv(out / name, ("x", "u"), (fld.grid.nodes, fld.values))
        entries.append({"t": fld.t, "file": name})
    write_csv(out / "moments.csv", ("t", "M", "M1", "M2", "supnorm"),
              zip(*[(r.t, r.mass, r.m1, r.m2, r.supnorm) for r in mom]))
    write_csv(out / "series.csv", ("t", "a", "M"), zip(*series))

    m0 = moments(DensityField(grid, _sampled(ic, grid), 0.0))
    exact = analytic_moments(ic)
    if exact is not None and ic.support[1] <= cfg.L:
        mass0, m1 = exact.mass, exact.m1
    else:
        mass0, m1 = m0.mass, m0.m1
    if cfg.solver == "spectral":
        mass0 = derived.pop("mass0_series")
    derived = {"M0": mass0, "M1_0": _finite(m1), "M0_grid": m0.mass, "M1_0_grid": m0.m1,
               "c_predicted": mass_ode.asymptotic_constants(m1).c if 0 < m1 < math.inf else None,
               **derived}
    manifest = RunManifest(cfg.to_json(), derived, _version(), time.perf_counter() - start, entries,
                           {"moments": "moments.csv", "series": "series.csv"})
    (out / "manifest.json").write_text(json.dumps(asdict(manifest), indent=2, default=_json_default) + "\n")
    return manifest


def _sampled(ic, grid):
    v = np.asarray(ic(grid.nodes), dtype=float)
    return np.maximum(v, 0.0)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    raise TypeError(f"not serialisable: {type(obj)}")


def _finite(x):
    return x if x is not None and math.isfinite(x) else None


# --- mass-ode -------------------------------------------------------------------

def mass_ode_run(ic_json: dict, t_end: float, rtol: float, atol: float, out: Path) -> dict:
    ic = ic_from_json(ic_json)
    resc = mass_ode.solve_a(ic, t_end, rtol=rtol, atol=atol)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "mass_ode.csv", ("t", "a", "M"), (resc.t, resc.a, resc.mass))
    law = mass_ode.mass_law(ic)
    c_pred = mass_ode.asymptotic_constants(law.m1).c if 0 < law.m1 < math.inf else None
    c_fit = exp_fit = None
    window = (t_end / 10, t_end)
    try:
        exp_fit = diagnostics.loglog_slope(resc.t, resc.a, window).slope
        sel = resc.t >= window[0]
        c_fit = float(np.mean(resc.a[sel] / resc.t[sel] ** (2.0 / 3.0)))
    except DomainError:
        pass
    summary = {"c_predicted": c_pred, "c_fitted": c_fit, "exponent_fitted": exp_fit,
               "fit_window": list(window), "M0": law.mass0, "M1": _finite(law.m1),
               "ic": ic_json, "rtol": rtol, "atol": atol, "t_end": t_end, "version": _version()}
    (out / "mass_ode_summary.json").write_text(json.dumps(summary, indent=2, default=_json_default) + "\n")
    return summary


# --- diagnose -------------------------------------------------------------------

def _rescaling_from_csv(path):
    cols = read_csv(path, ("t", "a", "M"))
    t, a, m = cols["t"], cols["a"], cols["M"]
    order = np.argsort(t)
    t, a, m = t[order], a[order], m[order]
    keep = np.concatenate([[True], np.diff(t) > 0])
    spline = interpolate.CubicHermiteSpline(t[keep], a[keep], m[keep])
    t_lo, t_hi = t[keep][0], t[keep][-1]

    def a_of(s):
        if not (t_lo <= s <= t_hi * (1 + 1e-12)):
            raise DomainError(f"time {s} outside the a(t) table [{t_lo}, {t_hi}]")
        return float(spline(min(s, t_hi)))
    return a_of, cols


def diagnose(moments_csv=None, mass_ode_csv=None, profiles=(), window=None, m1=None,
             eta_max=10.0) -> dict:
    """JSON-ready report from solver and mass-ode CSV outputs.

    ``profiles`` is a sequence of ``(t, path)`` pairs. Entries that cannot be
    computed from the given inputs are ``None``.
    """
    report = {"slope_mass": None, "slope_a": None, "collapse_exponent": None,
              "attractor_rate": None, "C_estimate": None, "window": list(window) if window else None}
    mom = None
    if moments_csv is not None:
        mom = read_csv(moments_csv, ("t", "M", "M1", "M2", "supnorm"))
        report["slope_mass"] = diagnostics.loglog_slope(mom["t"], mom["M"], window).slope
    a_of = None
    if mass_ode_csv is not None:
        a_of, cols = _rescaling_from_csv(mass_ode_csv)
        report["slope_a"] = diagnostics.loglog_slope(cols["t"], cols["a"], window).slope
    if profiles:
        if a_of is None:
            raise DomainError("profile diagnostics need the mass-ode CSV for a(t)")
        if m1 is None:
            if mom is None:
                raise DomainError("profile diagnostics need --m1 or a moments CSV")
            m1 = float(mom["M1"][np.argmin(mom["t"])])
        fields_ = []
        for t, path in sorted(profiles):
            cols = read_csv(path, ("x", "u"))
            x, u = cols["x"], cols["u"]
            grid = Grid1D(float(x[-1]), x.size)
            if not np.allclose(grid.nodes, x, rtol=0, atol=1e-9 * max(1.0, x[-1])):
                raise DomainError(f"{path} is not on a uniform grid starting at 0")
            fields_.append(DensityField(grid, np.maximum(u, 0.0), float(t)))
        if len(fields_) >= 3:
            rep = diagnostics.collapse(fields_, a_of, m1, eta_max=eta_max, window=window)
            report["collapse_exponent"] = _finite(rep.exponent)
            report["collapse_distances"] = [[t, d] for t, d in zip(rep.times, rep.distances)]
        errs = np.array([diagnostics.attractor_error(f, a_of, m1) for f in fields_])
        ts = np.array([f.t for f in fields_])
        if len(fields_) >= 2 and np.all(errs > 0):
            report["attractor_rate"] = float(np.polyfit(np.log(ts), np.log(errs), 1)[0])
        report["attractor_errors"] = [[float(t), float(e)] for t, e in zip(ts, errs)]
    grid01 = np.arange(0.0, 10.0 + 1e-9, 0.01)
    report["C_estimate"] = diagnostics.phi_kernel_bound(grid01, grid01[1:])
    return report


# --- argument parsing -----------------------------------------------------------

def _times(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad time list {text!r}") from None


def _window(text: str) -> tuple:
    vals = _times(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("window needs two comma-separated times")
    return vals


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise DomainError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nonlocal-diffusion", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="run a solver and write CSV profiles, moments and a manifest")
    s.add_argument("--config", help="JSON file whose entries override the flags")
    s.add_argument("--solver", choices=SOLVERS)
    s.add_argument("--ic", help="initial condition JSON, e.g. '{\"variant\": \"Indicator\", \"params\": {\"lo\": 1, \"hi\": 2}}'")
    s.add_argument("--L", type=float)
    s.add_argument("--nx", type=int)
    s.add_argument("--t-end", type=float)
    s.add_argument("--outputs", type=_times)
    s.add_argument("--theta", type=float)
    s.add_argument("--dt", type=float)
    s.add_argument("--rtol", type=float)
    s.add_argument("--atol", type=float)
    s.add_argument("--modes", type=int)
    s.add_argument("--quad-nodes", type=int)
    s.add_argument("--moment-samples", type=int, help="moment records per decade of time")
    s.add_argument("--moment-t0", type=float, help="first moment record time")
    s.add_argument("--out", help="output directory")
    s.add_argument("--label")

    m = sub.add_parser("mass-ode", help="solve the scalar mass law and write (t, a, M)")
    m.add_argument("--config")
    m.add_argument("--ic")
    m.add_argument("--t-end", type=float)
    m.add_argument("--rtol", type=float, default=1e-8)
    m.add_argument("--atol", type=float, default=1e-12)
    m.add_argument("--out", default="mass_ode")

    d = sub.add_parser("diagnose", help="decay slopes and collapse report from CSV outputs")
    d.add_argument("--moments", help="moments CSV (t,M,M1,M2,supnorm)")
    d.add_argument("--mass-ode", help="mass-ode CSV (t,a,M)")
    d.add_argument("--manifest", help="simulate manifest; its profiles are used")
    d.add_argument("--profile", action="append", default=[], metavar="T=PATH")
    d.add_argument("--window", type=_window)
    d.add_argument("--m1", type=float)
    d.add_argument("--eta-max", type=float, default=10.0)
    d.add_argument("--out", help="report path (default: standard output)")

    f = sub.add_parser("profile", help="tabulate the self-similar profile f_mu")
    f.add_argument("--mu", type=float, required=True)
    f.add_argument("--xi-min", type=float, default=0.0)
    f.add_argument("--xi-max", type=float, default=10.0)
    f.add_argument("--xi-step", type=float, default=0.01)
    f.add_argument("--out", help="CSV path (default: standard output)")
    return p


def _merge(args, names) -> dict:
    cfg = {n: getattr(args, n) for n in names if getattr(args, n, None) is not None}
    if getattr(args, "config", None):
        try:
            extra = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot load config: {exc}") from None
        if not isinstance(extra, dict):
            raise DomainError("config file must hold a JSON object")
        cfg.update({k.replace("-", "_"): v for k, v in extra.items()})
    if isinstance(cfg.get("ic"), str):
        try:
            cfg["ic"] = json.loads(cfg["ic"])
        except json.JSONDecodeError as exc:
            raise DomainError(f"ic is not valid JSON: {exc}") from None
    return cfg


def _cmd_simulate(args) -> dict:
    names = [f.name for f in fields(RunConfig)]
    cfg = RunConfig.from_json(_merge(args, names))
    man = simulate(cfg)
    return {"out": cfg.out, "profiles": len(man.profiles), "wall_clock_s": man.wall_clock_s}


def _cmd_mass_ode(args) -> dict:
    cfg = _merge(args, ["ic", "t_end", "rtol", "atol", "out"])
    if cfg.get("ic") is None or cfg.get("t_end") is None:
        raise DomainError("mass-ode needs ic and t_end")
    return mass_ode_run(cfg["ic"], float(cfg["t_end"]), float(cfg["rtol"]), float(cfg["atol"]), Path(cfg["out"]))


def _cmd_diagnose(args) -> dict:
    profiles = []
    for item in args.profile:
        t, sep, path = item.partition("=")
        if not sep:
            raise DomainError(f"--profile expects T=PATH, got {item!r}")
        try:
            profiles.append((float(t), path))
        except ValueError:
            raise DomainError(f"bad profile time {t!r}") from None
    moments_csv = args.moments
    if args.manifest:
        try:
            man = json.loads(Path(args.manifest).read_text())
            base = Path(args.manifest).parent
            profiles.extend((float(e["t"]), str(base / e["file"])) for e in man["profiles"])
            if moments_csv is None:
                moments_csv = str(base / man["files"]["moments"])
        except (OSError, KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"bad manifest: {exc}") from None
    report = diagnose(moments_csv, args.mass_ode, profiles, args.window, args.m1, args.eta_max)
    text = json.dumps(report, indent=2, default=_json_default) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return {}


def _cmd_profile(args) -> dict:
    spec = ProfileSpec(args.mu)
    if not (args.xi_step > 0 and args.xi_max >= args.xi_min >= 0):
        raise DomainError("need 0 <= xi_min <= xi_max and xi_step > 0")
    n = int(math.floor((args.xi_max - args.xi_min) / args.xi_step + 1e-9)) + 1
    xi = args.xi_min + args.xi_step * np.arange(n)
    vals = f_mu(spec, xi)
    target = args.out or sys.stdout
    np.savetxt(target, np.column_stack([xi, vals]), fmt="%.17g", delimiter=",", header="xi,f_mu", comments="")
    return {}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        handler = {"simulate": _cmd_simulate, "mass-ode": _cmd_mass_ode,
                   "diagnose": _cmd_diagnose, "profile": _cmd_profile}[args.command]
        info = handler(args)
    except (DomainError, TypeError) as exc:
        _fail("invalid_input", exc)
        return EXIT_INPUT
    except (AccuracyError, ArithmeticError, np.linalg.LinAlgError) as exc:
        _fail("numerical_failure", exc)
        return EXIT_NUMERIC
    if info and args.command in ("simulate", "mass-ode"):
        sys.stdout.write(json.dumps(info, default=_json_default) + "\n")
    return EXIT_OK


def _fail(kind, exc):
    sys.stderr.write(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}) + "\n")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
