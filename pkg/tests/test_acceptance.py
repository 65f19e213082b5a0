"""Acceptance criteria, one PASS/FAIL line each.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``. Tolerances are fixed here and are not
tuned to results.
"""

from __future__ import annotations

import functools
import math
import time
import warnings

import numpy as np
import pytest
from scipy import integrate

from nonlocal_diffusion.core import (NEG_TOL, Grid1D, Indicator, PowerTail, ScaledSine, SelfSimilarSeed,
                                     Tabulated, moments)
from nonlocal_diffusion.diagnostics import (SUP_CONST, attractor_error, collapse, loglog_slope)
from nonlocal_diffusion.fd_solver import FdConfig, run as run_fd
from nonlocal_diffusion.kernel_solver import KernelRun, evaluate, evaluate_at
from nonlocal_diffusion.mass_ode import asymptotic_constants, mass_law, solve_a, tail_exponent_of_a
from nonlocal_diffusion.profile import euler_integral_oracle, f_mu, f_mu_series, f_mu_tail_exponent, kummer_1f1
from nonlocal_diffusion.spectral_bounded import ExplicitSolution, evaluate_bounded, solve_bounded_a, spectral_state

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # standalone run
    ACCEPTANCE_LINES = []

# pinned tolerances
TOL = {
    "c1_ode_slope": 0.02, "c1_ode_runtime_s": 1.0, "c1_fd_slope": 0.05,
    "c2_rel": 0.05,
    "c3_exponent": 0.05,
    "c4_gap": 5e-3, "c4_ratio": 2.0,
    "c5_exponent": -0.30,
    "c6_fluct": 0.10,
    "c8_kernel": 1e-4, "c8_fd": 1e-2,
    "c9_exact": 1e-10, "c9_ratio": 2.0,
    "c10_kummer": 1e-10, "c10_third": 1e-12, "c10_slope": 0.05, "c10_euler": 1e-8,
}

CHI = Indicator(1.0, 2.0)
M1_CHI = 1.5


@functools.lru_cache(maxsize=None)
def chi_rescaling():
    return solve_a(CHI, 1e5)


@functools.lru_cache(maxsize=None)
def fd_long():
    mt = tuple(np.geomspace(1.0, 5e4, 95))
    cfg = FdConfig(Grid1D.from_spacing(400.0, 0.2), 5e4, (50.0, 500.0, 5000.0, 50000.0), moment_times=mt)
    start = time.perf_counter()
    res = run_fd(cfg, CHI)
    return res, time.perf_counter() - start


@functools.lru_cache(maxsize=None)
def kernel_run(length, dx):
    return KernelRun(CHI, chi_rescaling(), Grid1D.from_spacing(length, dx))


def report(number, title, checks):
    """Record one line; ``checks`` is a list of (label, ok, detail)."""
    ok = all(c[1] for c in checks)
    detail = "; ".join(f"{label} {'ok' if good else 'FAIL'} ({text})" for label, good, text in checks)
    line = f"[{'PASS' if ok else 'FAIL'}] C{number} {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok, line


# --- criteria ----------------------------------------------------------------------

def criterion_1():
    mass_law.cache_clear()
    start = time.perf_counter()
    r = solve_a(Indicator(1.0, 2.0), 1e5)
    elapsed = time.perf_counter() - start
    ts = np.geomspace(1e4, 1e5, 40)
    s_ode = loglog_slope(ts, r.mass_at(ts), (1e4, 1e5)).slope
    res, fd_time = fd_long()
    t = np.array([rec.t for rec, _ in res.moment_series])
    m = np.array([rec.mass for rec, _ in res.moment_series])
    s_fd = loglog_slope(t, m, (5e3, 5e4)).slope
    return report(1, "mass-decay law", [
        ("mass_ode slope", abs(s_ode + 1 / 3) <= TOL["c1_ode_slope"], f"{s_ode:.5f}"),
        ("mass_ode runtime", elapsed < TOL["c1_ode_runtime_s"], f"{elapsed:.3f}s"),
        ("fd slope", abs(s_fd + 1 / 3) <= TOL["c1_fd_slope"], f"{s_fd:.5f}, run {fd_time:.1f}s"),
    ])


def criterion_2():
    c = asymptotic_constants(M1_CHI).c
    ratio = chi_rescaling().a_at(1e5) / 1e5 ** (2 / 3)
    return report(2, "asymptotic constant", [
        ("c", abs(c - 1.1724) < 1e-4, f"{c:.6f}"),
        ("a(1e5)/1e5^(2/3)", abs(ratio / c - 1) <= TOL["c2_rel"], f"{ratio:.6f}, rel {ratio / c - 1:+.2e}"),
    ])


def criterion_3():
    r = solve_a(PowerTail(1.5), 1e5)
    p = tail_exponent_of_a(r, (1e4, 1e5))
    return report(3, "heavy-tail exponent", [
        ("a-exponent", abs(p - 0.8) <= TOL["c3_exponent"], f"{p:.4f} vs 0.8"),
    ])


def _fd_gap(dx):
    g = Grid1D.from_spacing(400.0, dx)
    dt = 0.9 * mass_law(CHI).mass0 * dx * dx / 2
    res = run_fd(FdConfig(g, 50.0, (50.0,), dt=dt), CHI)
    fld, _ = res[0]
    ref = evaluate_at(KernelRun(CHI, chi_rescaling(), g), fld.t, g.nodes)
    return float(np.max(np.abs(fld.values - ref)))


def criterion_4():
    g1, g2 = _fd_gap(0.1), _fd_gap(0.05)
    return report(4, "cross-solver oracle", [
        ("gap dx=0.1", g1 <= TOL["c4_gap"], f"{g1:.4e}"),
        ("halving dx", g1 / g2 >= TOL["c4_ratio"], f"ratio {g1 / g2:.4f}, gap dx=0.05 {g2:.4e}"),
    ])


def criterion_5():
    run = kernel_run(400.0, 0.1)
    times = (50.0, 500.0, 5000.0, 50000.0)
    rep = collapse([evaluate(run, t) for t in times], chi_rescaling(), M1_CHI, window=(5e2, 5e4))
    d = np.array(rep.distances)
    return report(5, "self-similar collapse", [
        ("d strictly decreasing", bool(np.all(np.diff(d) < 0)), ", ".join(f"{v:.3e}" for v in d)),
        ("exponent", rep.exponent <= TOL["c5_exponent"], f"{rep.exponent:.4f}"),
    ])


def criterion_6():
    run = kernel_run(800.0, 0.2)
    ts = np.geomspace(1e3, 1e5, 21)
    v = np.array([attractor_error(evaluate(run, t), chi_rescaling(), M1_CHI) * t for t in ts])
    # every later value may exceed an earlier one by at most the allowed fluctuation
    worst = max(v[j] / v[i] for i in range(len(v)) for j in range(i + 1, len(v)))
    return report(6, "convergence-rate bound", [
        ("error*t non-increasing", worst <= 1 + TOL["c6_fluct"],
         f"max later/earlier {worst:.4f}, range {v.min():.3e}..{v.max():.3e}"),
    ])


def _builtin_ics():
    xs = np.linspace(0.0, 3.0, 31)
    return {
        "Indicator": Indicator(1.0, 2.0),
        "ScaledSine": ScaledSine(2.0),
        "PowerTail": PowerTail(1.5),
        "SelfSimilarSeed": SelfSimilarSeed(1.5, 1.0),
        "Tabulated": Tabulated(tuple(xs * (3.0 - xs)), tuple(xs)),
    }


def _restricted_m1(ic, hi):
    brk = sorted({0.0, hi, *[b for b in ic.breakpoints if 0 < b < hi]})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return sum(integrate.quad(lambda x: x * float(ic(x)), p, q, epsrel=1e-12, limit=200)[0]
                   for p, q in zip(brk[:-1], brk[1:]))


def _violation(umax, a, m1):
    if not math.isfinite(m1) or a <= 0:
        return -1.0  # bound is infinite
    bound = m1 / (SUP_CONST * a)
    return (umax - bound) / bound


def criterion_7():
    worst = {}
    # kernel solver, half-line
    times = np.geomspace(0.1, 1e4, 11)
    for name, ic in _builtin_ics().items():
        r = solve_a(ic, 1e4)
        run = KernelRun(ic, r, Grid1D.from_spacing(400.0, 0.1))
        m1 = mass_law(ic).m1
        worst[f"kernel/{name}"] = max(_violation(evaluate(run, t).values.max(), r.a_at(t), m1) for t in times)
    # finite differences: its own sampled data, cumulative a and discrete first moment
    for name, ic in _builtin_ics().items():
        mt = tuple(np.geomspace(0.1, 1e3, 11))
        res = run_fd(FdConfig(Grid1D.from_spacing(100.0, 0.1), 1e3, moment_times=mt), ic)
        m1 = moments(res.initial.field).m1
        worst[f"fd/{name}"] = max(_violation(rec.supnorm, st.a, m1) for rec, st in res.moment_series)
    # spectral solver on (0, pi) with the data restricted there
    g = Grid1D(math.pi, 1001)
    for name, ic in _builtin_ics().items():
        s = solve_bounded_a(spectral_state(ic), 100.0)
        m1 = _restricted_m1(ic, math.pi)
        worst[f"spectral/{name}"] = max(
            _violation(evaluate_bounded(s, t, g).values.max(), s.rescaling.a_at(t), m1)
            for t in np.geomspace(0.01, 100.0, 9))
    bad = {k: v for k, v in worst.items() if v > NEG_TOL}
    top = max(worst, key=worst.get)
    return report(7, "sup-norm bound", [
        ("violations", not bad, f"{len(bad)} of {len(worst)} solver/ic pairs; "
                                f"closest {top} at {worst[top]:+.2e} relative to the bound"),
    ])


def criterion_8():
    run = kernel_run(400.0, 0.1)
    drift_k = max(abs(moments(evaluate(run, t)).m1 / M1_CHI - 1) for t in np.geomspace(1.0, 1e4, 13))
    res, _ = fd_long()
    m10 = moments(res.initial.field).m1
    drift_fd = max(abs(rec.m1 + st.right_m1_loss - m10) / m10 for rec, st in res.moment_series)
    return report(8, "first-moment conservation", [
        ("kernel drift to 1e4", drift_k <= TOL["c8_kernel"], f"{drift_k:.2e}"),
        ("fd drift to 5e4 with boundary loss", drift_fd <= TOL["c8_fd"], f"{drift_fd:.2e}"),
    ])


def criterion_9():
    x = np.linspace(0.0, math.pi, 201)
    err = 0.0
    for mass in (2.0, 0.5, 3.0):
        s = solve_bounded_a(spectral_state(ScaledSine(mass)), 1e3)
        w = ExplicitSolution(mass)
        for t in np.geomspace(1e-3, 1e3, 25):
            err = max(err, float(np.max(np.abs(evaluate_bounded(s, t, x) - w(t, x)))))
    s = solve_bounded_a(spectral_state(Indicator(0.0, math.pi)), 1e3)
    w = ExplicitSolution(s.mass0)
    ts = np.geomspace(10.0, 1e3, 21)
    v = np.array([np.max(np.abs(evaluate_bounded(s, t, x) - w(t, x))) * t * t for t in ts])
    return report(9, "bounded-domain exactness", [
        ("single-mode error", err <= TOL["c9_exact"], f"{err:.2e}"),
        ("w=1 t^2 error bounded", v.max() / v.min() <= TOL["c9_ratio"], f"range {v.min():.4f}..{v.max():.4f}"),
    ])


def criterion_10():
    resid = 0.0
    for mu in np.linspace(1 / 3, 0.9, 18):
        for xi in np.linspace(0.0, 10.0, 101):
            z = -mu * xi * xi / 2
            lhs = xi * kummer_1f1(1 / (2 * mu), 1.5, z)
            rhs = xi * math.exp(z) * kummer_1f1(1.5 - 1 / (2 * mu), 1.5, -z)
            resid = max(resid, abs(lhs - rhs) / (1 + abs(lhs)))
    xi = np.linspace(0.0, 10.0, 1001)
    third = float(np.max(np.abs(f_mu(1 / 3, xi) - xi * np.exp(-xi * xi / 6))))
    slopes = {mu: f_mu_tail_exponent(mu, 50, 200) for mu in (0.5, 2 / 3)}
    slope_ok = all(abs(s - (1 - 1 / mu)) <= TOL["c10_slope"] for mu, s in slopes.items())
    euler = 0.0
    # the Euler integral needs alpha < beta, which excludes mu = 1/3 itself
    for mu in (0.34, 0.5, 2 / 3, 0.9):
        for x in (0.5, 1.0, 2.0, 3.0):
            ser = f_mu_series(mu, x) / x
            euler = max(euler, abs(euler_integral_oracle(1 / (2 * mu), 1.5, -mu * x * x / 2) - ser))
    return report(10, "profile module", [
        ("Kummer identity", resid < TOL["c10_kummer"], f"{resid:.2e}"),
        ("mu=1/3 closed form", third < TOL["c10_third"], f"{third:.2e}"),
        ("tail slopes", slope_ok, ", ".join(f"mu={mu:.3f}: {s:.4f}" for mu, s in slopes.items())),
        ("Euler oracle vs series", euler < TOL["c10_euler"], f"{euler:.2e}"),
    ])


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"C{i}" for i in range(1, 11)])
def test_criterion(criterion):
    ok, line = criterion()
    assert ok, line


if __name__ == "__main__":
    results = [c()[0] for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
