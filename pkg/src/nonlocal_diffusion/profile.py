"""Self-similar profiles and Kummer's confluent hypergeometric function.

The profiles ``f_mu`` solve ``f'' = (mu - 1) f - mu xi f'`` with
``f(0) = 0`` and are normalised by ``f'(0) = 1``, which gives

    f_mu(xi) = xi * 1F1(1/(2 mu), 3/2; -mu xi^2 / 2),     mu in (0, 1)
    f_0(xi)  = sin(xi).

Only ``mu = 1/3`` has finite mass; it is ``xi exp(-xi^2/6)``. For
``mu > 1/3`` the profile decays like ``xi^(1 - 1/mu)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .core import AccuracyError, DomainError

__all__ = [
    "ProfileSpec",
    "AttractorParams",
    "kummer_1f1",
    "f_mu",
    "f_mu_series",
    "f_mu_tail_exponent",
    "euler_integral_oracle",
    "attractor",
]

Z_SWITCH = 30.0
SERIES_TOL = 1e-16
MAX_TERMS = 20000


@dataclass(frozen=True)
class ProfileSpec:
    mu: float
    tol: float = SERIES_TOL
    z_switch: float = Z_SWITCH

    def __post_init__(self):
        if not (0 <= self.mu < 1):
            raise DomainError(f"similarity exponent must lie in [0, 1), got {self.mu}")
        if self.tol <= 0 or self.z_switch <= 0:
            raise DomainError("tolerance and switch threshold must be positive")


@dataclass(frozen=True)
class AttractorParams:
    m1: float
    a: float

    def __post_init__(self):
        if self.m1 <= 0 or self.a <= 0:
            raise DomainError("attractor needs m1 > 0 and a > 0")


def _is_nonpositive_int(v: float) -> bool:
    return v <= 0 and v == math.floor(v)


def _series(alpha, beta, z, tol, max_terms=MAX_TERMS):
    # plain power series; exact (terminating) when alpha is a nonpositive integer
    total = 1.0
    term = 1.0
    for k in range(max_terms):
        term *= (alpha + k) / (beta + k) * z / (k + 1)
        total += term
        if term == 0.0 or abs(term) < tol * abs(total):
            return total
    raise AccuracyError(f"1F1({alpha}, {beta}; {z}) series did not converge in {max_terms} terms")


def _asymptotic_negative(alpha, beta, x, tol):
    """1F1(alpha, beta; -x) for large positive x, algebraic part only.

    The discarded part is of relative size exp(-x).
    """
    total = 1.0
    term = 1.0
    best = math.inf
    for s in range(MAX_TERMS):
        nxt = term * (alpha + s) * (alpha - beta + 1 + s) / ((s + 1) * x)
        if abs(nxt) > best:
            # divergent tail: stop at the smallest term
            break
        best = abs(nxt)
        term = nxt
        total += term
        if term == 0.0 or abs(term) < tol * abs(total):
            break
    if best > 1e-12 * abs(total) and best != math.inf:
        raise AccuracyError(f"asymptotic series for 1F1({alpha}, {beta}; {-x}) too inaccurate")
    return math.gamma(beta) / math.gamma(beta - alpha) * x ** (-alpha) * total


def kummer_1f1(alpha: float, beta: float, z: float, tol: float = SERIES_TOL,
               z_switch: float = Z_SWITCH, max_terms: int = MAX_TERMS) -> float:
    """Confluent hypergeometric function ``1F1(alpha, beta; z)`` for real input.

    Negative arguments go through Kummer's transformation
    ``1F1(a, b; z) = e^z 1F1(b - a, b; -z)`` so the summed series has no
    sign cancellation when ``b > a``; beyond ``z_switch`` the algebraic
    large-argument expansion is used instead.
    """
    if _is_nonpositive_int(beta):
        raise DomainError(f"1F1 undefined for beta = {beta}")
    if z == 0.0:
        return 1.0
    if z >= 0 or _is_nonpositive_int(alpha):
        return _series(alpha, beta, z, tol, max_terms)
    x = -z
    alpha_t = beta - alpha
    if x > z_switch and not _is_nonpositive_int(alpha_t):
        return _asymptotic_negative(alpha, beta, x, tol)
    return math.exp(z) * _series(alpha_t, beta, x, tol, max_terms)


def f_mu(spec: ProfileSpec | float, xi):
    """Self-similar profile ``f_mu`` at ``xi >= 0`` (scalar or array)."""
    if not isinstance(spec, ProfileSpec):
        spec = ProfileSpec(float(spec))
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(xi_arr < 0):
        raise DomainError("profile argument must be nonnegative")
    mu = spec.mu
    if mu == 0.0:
        out = np.sin(xi_arr)
    else:
        alpha = 1.0 / (2.0 * mu)
        flat = xi_arr.ravel()
        vals = np.empty_like(flat)
        for i, v in enumerate(flat):
            vals[i] = v * kummer_1f1(alpha, 1.5, -0.5 * mu * v * v, spec.tol, spec.z_switch)
        out = vals.reshape(xi_arr.shape)
    return float(out) if out.ndim == 0 else out


def f_mu_series(mu: float, xi, tol: float = 1e-17):
    """``f_mu`` from the Taylor recurrence ``b_{k+2} = (mu-1-mu k) b_k / ((k+1)(k+2))``.

    Starts from ``b_0 = 0, b_1 = 1``. Only practical for moderate ``xi``.
    """
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.empty_like(xi_arr)
    for i, v in enumerate(xi_arr):
        b = 1.0
        k = 1
        term = v
        total = term
        while True:
            b *= (mu - 1 - mu * k) / ((k + 1) * (k + 2))
            k += 2
            term = b * v**k
            total += term
            if abs(term) <= tol * abs(total) or term == 0.0:
                break
            if k > 2 * MAX_TERMS:
                raise AccuracyError("Taylor recurrence did not converge")
        out[i] = total
    return float(out[0]) if np.ndim(xi) == 0 else out


def f_mu_tail_exponent(spec: ProfileSpec | float, xi_lo: float, xi_hi: float, n: int = 64) -> float:
    """Least-squares slope of ``log f_mu`` against ``log xi`` on ``[xi_lo, xi_hi]``."""
    if not isinstance(spec, ProfileSpec):
        spec = ProfileSpec(float(spec))
    if not (0 < xi_lo < xi_hi):
        raise DomainError("need 0 < xi_lo < xi_hi")
    xi = np.geomspace(xi_lo, xi_hi, n)
    f = f_mu(spec, xi)
    if np.any(f <= 0):
        raise DomainError(f"f_mu is not positive on [{xi_lo}, {xi_hi}] for mu = {spec.mu}")
    slope, _ = np.polyfit(np.log(xi), np.log(f), 1)
    return float(slope)


def euler_integral_oracle(alpha: float, beta: float, z: float) -> float:
    """``1F1`` from Euler's integral, by algebraic-weight quadrature.

    ``Gamma(b) / (Gamma(b-a) Gamma(a)) * int_0^1 e^{zt} t^{a-1} (1-t)^{b-a-1} dt``
    with ``0 < a < b``. The endpoint singularities are carried by the
    quadrature weight, so only ``e^{zt}`` is sampled.
    """
    if not (0 < alpha < beta):
        raise DomainError(f"Euler integral needs 0 < alpha < beta, got ({alpha}, {beta})")
    # shift the exponential so the sampled function stays O(1)
    shift = max(z, 0.0)
    val, err = integrate.quad(lambda t: math.exp(z * t - shift), 0.0, 1.0, weight="alg",
                              wvar=(alpha - 1.0, beta - alpha - 1.0), epsabs=0.0, epsrel=1e-13,
                              limit=200)
    logpref = math.lgamma(beta) - math.lgamma(beta - alpha) - math.lgamma(alpha)
    return math.exp(logpref + shift) * val


def attractor(params: AttractorParams, x):
    """Large-time profile ``M1 x / (2 sqrt(pi) a^{3/2}) exp(-x^2/(4a))``."""
    x = np.asarray(x, dtype=float)
    m1, a = params.m1, params.a
    out = m1 * x / (2.0 * math.sqrt(math.pi) * a**1.5) * np.exp(-x * x / (4.0 * a))
    return float(out) if out.ndim == 0 else out
