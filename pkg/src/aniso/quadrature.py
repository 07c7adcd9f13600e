"""Threshold integrals near the origin and fits of their divergence exponents.

The integrals are reduced to radial (and one angular) variables: with u the
cosine of the angle to e_1, d xi = rho^{d-1} (1-u^2)^{(d-3)/2} du dS^{d-2} d rho.
Radial integrals run in log rho so the power-law endpoint at 0 becomes an
exponentially decaying tail.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate

from aniso.errors import DivergenceError, InconsistencyError
from aniso.fitting import FitResult, loglog_fit

EPSREL = 1e-11
LIMIT = 400


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^n in R^{n+1}, from |S^n| = 2 pi / (n - 1) |S^{n-2}|."""
    if n < 0:
        raise ValueError("sphere dimension must be >= 0")
    if n == 0:
        return 2.0
    if n == 1:
        return 2.0 * math.pi
    return 2.0 * math.pi / (n - 1) * sphere_area(n - 2)


def _g(u: float, m: float) -> float:
    """((1 - u^2)^m - 1) / u^2, finite at u = 0."""
    u2 = u * u
    if u2 < 1e-300:
        return -m
    return math.expm1(m * math.log1p(-u2)) / u2


def _angular_scaled(m: float, a: float, power: int) -> float:
    """a * int_{-1}^{1} (1-u^2)^m k(u) du with k = 1/(u^2 + a^2) (power 2) or 1/(|u| + a)^2 (power 1).

    The scaled value tends to pi (power 2) or 2 (power 1) as a -> 0. The m = 0
    part is closed form; quad only sees the bounded remainder.
    """
    if power == 2:
        peak = 2.0 * math.atan2(1.0, a)
        frac = lambda u: u * u / (u * u + a * a)  # noqa: E731
    else:
        peak = 2.0 / (1.0 + a)
        frac = lambda u: (u / (u + a)) ** 2  # noqa: E731
    if m == 0 or a == 0:
        return peak

    def rest(u):
        return _g(u, m) * frac(u)

    with warnings.catch_warnings():
        # roundoff near the requested 1e-11 is reported but harmless here
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        tail, _ = integrate.quad(rest, 0.0, 1.0, epsabs=0.0, epsrel=EPSREL, limit=LIMIT, points=[min(a, 0.5)])
    return peak + 2.0 * a * tail


def _radial(integrand, rho_min: float, R: float) -> float:
    """int integrand(t) dt over log(rho_min) < t < log(R); the integrand already carries the rho^d Jacobian."""
    lo = -np.inf if rho_min == 0 else math.log(rho_min)
    val, _ = integrate.quad(integrand, lo, math.log(R), epsabs=0.0, epsrel=EPSREL, limit=LIMIT)
    return val


def _gap(d: int, r: float, delta: float) -> float:
    """Power of rho in the integrand near the origin (in d rho / rho); the integral is finite iff it is positive."""
    return 2 * r - 1 if d == 1 else d - (1 + delta - 2 * r)


def _check_args(d, delta, R, rho_min):
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d}")
    if not delta > 1:
        raise ValueError(f"delta must exceed 1, got {delta}")
    if not 0 <= rho_min < R:
        raise ValueError(f"need 0 <= rho_min < R, got rho_min={rho_min}, R={R}")


def _check_finite(d, r, delta, rho_min, what):
    if rho_min == 0 and _gap(d, r, delta) <= 0:
        edge = "2r <= 1" if d == 1 else f"d={d} <= 1 + delta - 2r = {1 + delta - 2 * r:g}"
        raise DivergenceError(f"{what} diverges at the origin: {edge}")


def low_freq_integral(d: int, r: float, delta: float, R: float = 1.0, rho_min: float = 0.0) -> float:
    """int_{rho_min < |xi| < R} |xi|^{2r} / (xi_1^2 + |xi|^{2 delta}) d xi."""
    _check_args(d, delta, R, rho_min)
    _check_finite(d, r, delta, rho_min, "integral")
    gap = _gap(d, r, delta)
    if d == 1:
        return 2.0 * _radial(lambda t: math.exp(gap * t) / (1.0 + math.exp((2 * delta - 2) * t)), rho_min, R)
    if d == 2:
        # the angular integral is 2 pi / (rho^{1+delta} sqrt(1 + rho^{2 delta - 2}))
        return 2.0 * math.pi * _radial(
            lambda t: math.exp(gap * t) / math.sqrt(1.0 + math.exp((2 * delta - 2) * t)), rho_min, R)
    m = (d - 3) / 2
    c = sphere_area(d - 2)
    return c * _radial(lambda t: math.exp(gap * t) * _angular_scaled(m, math.exp((delta - 1) * t), 2), rho_min, R)


def inverse_mu_l2(d: int, r: float, delta: float, R: float = 1.0, rho_min: float = 0.0) -> float:
    """||1/mu_{r,delta}||_{L^2(rho_min < |xi| < R)}."""
    _check_args(d, delta, R, rho_min)
    _check_finite(d, r, delta, rho_min, "1/mu in L^2")
    gap = _gap(d, r, delta)
    if d == 1:
        val = 2.0 * _radial(lambda t: math.exp(gap * t) / (1.0 + math.exp((delta - 1) * t)) ** 2, rho_min, R)
    else:
        m = (d - 3) / 2
        c = sphere_area(d - 2)
        val = c * _radial(lambda t: math.exp(gap * t) * _angular_scaled(m, math.exp((delta - 1) * t), 1), rho_min, R)
    return math.sqrt(val)


def schwartz_integral(d: int, r: float, delta: float) -> float:
    """J = int_{B(0,1)} (xi_1^2 + |xi|^{2 delta}) / |xi|^{2r} d xi.

    The xi_1^2 part equals (1/d) int |xi|^{2 - 2r} by symmetry of the coordinates.
    """
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d}")
    if delta < 1:
        raise ValueError(f"delta must be >= 1, got {delta}")
    if r >= (2 + d) / 2:
        raise DivergenceError(f"J diverges: r={r} >= (2 + d)/2 = {(2 + d) / 2:g}")
    area = sphere_area(d - 1)
    j1 = area / (d * (d + 2 - 2 * r))
    j2 = area / (d + 2 * delta - 2 * r)
    return j1 + j2


INTEGRAL_KINDS = {"low_freq": low_freq_integral, "inverse_mu_l2": inverse_mu_l2}


def divergence_exponent_scan(kind: str, params: dict, rho_mins) -> FitResult:
    """Fit log(value) against log(rho_min) for a cutoff integral.

    ``params`` holds d, r, delta and optionally R. The cutoff integrals are
    nonincreasing in rho_min; data that are not raise InconsistencyError.
    """
    if kind not in INTEGRAL_KINDS:
        raise ValueError(f"unknown integral kind {kind!r}; choose from {sorted(INTEGRAL_KINDS)}")
    rho = np.sort(np.asarray(rho_mins, dtype=float))
    if rho.size < 4 or math.log2(rho[-1] / rho[0]) < 3:
        raise ValueError("scan needs at least 4 points spanning at least 3 octaves")
    fn = INTEGRAL_KINDS[kind]
    vals = np.array([fn(params["d"], params["r"], params["delta"], params.get("R", 1.0), float(p)) for p in rho])
    if np.any(np.diff(vals) > 1e-12 * np.abs(vals[:-1])):
        raise InconsistencyError("cutoff integral increased with the cutoff radius")
    return loglog_fit(rho, vals)
