"""Spectral solvers for traveling-wave equations

    -gamma d_1 u + beta phi(D) u = f                                   (linear)
    -gamma d_1 zeta(u) + phi(D) psi(u) = f                             (composition)
    -gamma d_1 zeta(u) - (-Delta)^{delta/2 - 1} div[(1 + psi(u)) grad u] = f   (divergence)

on a periodic grid. All data are mean-zero: the symbols vanish at xi = 0, so
constants are quotiented out and every inverse sets the zero mode to 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from aniso.errors import DivergenceError, DomainError
from aniso.multipliers import SpaceParams, SymbolSpec, linear_symbol, phi_eval
from aniso.norms import IntersectionWeight, XWeight, weighted_norm
from aniso.spectral import SpectralField, apply_multiplier, forward_transform, pointwise_product

RADIUS_SAFETY = 0.9
MAX_HALVINGS = 6
GROWTH_LIMIT = 5


@dataclass(frozen=True)
class PowerSeries:
    """sum_{m=1}^{M} a_m u^m with radius of convergence ``radius``."""

    coeffs: tuple
    radius: float = math.inf

    def __post_init__(self):
        c = tuple(float(a) for a in self.coeffs)
        if not c:
            raise ValueError("need at least the linear coefficient")
        if c[0] == 0:
            raise ValueError("linear coefficient must be nonzero")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def identity(cls) -> "PowerSeries":
        return cls((1.0,))

    @classmethod
    def exp_minus_one(cls, order: int = 16) -> "PowerSeries":
        return cls(tuple(1.0 / math.factorial(m) for m in range(1, order + 1)))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @property
    def slope(self) -> float:
        """The derivative at 0."""
        return self.coeffs[0]

    def __call__(self, u: np.ndarray) -> np.ndarray:
        out = np.zeros_like(u)
        for a in reversed(self.coeffs):
            out = (out + a) * u
        return out

    def derivative(self, u: np.ndarray) -> np.ndarray:
        out = np.zeros_like(u)
        for m in range(self.order, 0, -1):
            out = out * u + m * self.coeffs[m - 1]
        return out

    def nonlinear_part(self, u: np.ndarray) -> np.ndarray:
        """The series minus its linear term."""
        out = np.zeros_like(u)
        for a in reversed(self.coeffs[1:]):
            out = (out + a) * u
        return out * u


def _check_radius(u_phys: np.ndarray, radius: float):
    sup = float(np.max(np.abs(u_phys))) if u_phys.size else 0.0
    if sup >= RADIUS_SAFETY * radius:
        raise DomainError(f"sup|u| = {sup:.6g} is not below {RADIUS_SAFETY} * radius = {RADIUS_SAFETY * radius:.6g}")


def power_series_eval(series: PowerSeries, u: SpectralField, dealias: str = "all") -> SpectralField:
    """Horner evaluation of the series on the physical samples of ``u``.

    ``dealias="all"`` applies the two-thirds rule to the whole result;
    ``"nonlinear"`` keeps the linear term a_1 u exact and truncates only the rest.
    """
    if dealias not in ("all", "nonlinear"):
        raise ValueError("dealias must be 'all' or 'nonlinear'")
    up = u.physical()
    _check_radius(up, series.radius)
    if dealias == "all":
        return forward_transform(u.grid, series(up)).dealiased()
    rest = forward_transform(u.grid, series.nonlinear_part(up)).dealiased()
    return u * series.slope + rest


# ---------------------------------------------------------------------------
# operators


@dataclass(frozen=True)
class LinearForm:
    gamma: float
    beta: float
    spec: SymbolSpec

    def __post_init__(self):
        _nonzero(gamma=self.gamma, beta=self.beta)

    @property
    def sigma(self) -> float:
        return self.spec.sigma

    def jacobian_symbol(self, xi):
        return linear_symbol(self.gamma, self.beta, self.spec, xi)


@dataclass(frozen=True)
class CompositionForm:
    gamma: float
    zeta: PowerSeries
    psi: PowerSeries
    spec: SymbolSpec

    def __post_init__(self):
        _nonzero(gamma=self.gamma)

    @property
    def sigma(self) -> float:
        return self.spec.sigma

    def jacobian_symbol(self, xi):
        return linear_symbol(self.zeta.slope * self.gamma, self.psi.slope, self.spec, xi)


@dataclass(frozen=True)
class DivergenceForm:
    """``psi=None`` stands for psi = 0."""

    gamma: float
    delta: float
    zeta: PowerSeries
    psi: Optional[PowerSeries] = None

    def __post_init__(self):
        _nonzero(gamma=self.gamma)
        if not self.delta > 1:
            raise ValueError("delta must exceed 1")

    @property
    def sigma(self) -> float:
        return self.delta

    @property
    def spec(self) -> SymbolSpec:
        return SymbolSpec.fractional_power(self.delta)

    def jacobian_symbol(self, xi):
        return linear_symbol(self.zeta.slope * self.gamma, 1.0, self.spec, xi)


Form = Union[LinearForm, CompositionForm, DivergenceForm]


def _nonzero(**kw):
    for k, v in kw.items():
        if v == 0:
            raise ValueError(f"{k} must be nonzero")


def _grad(u: SpectralField, axis: int) -> SpectralField:
    return apply_multiplier(u, lambda xi: 2j * np.pi * xi[..., axis], "zero")


def _neg_frac_div(fluxes, delta: float) -> SpectralField:
    total = None
    for j, w in enumerate(fluxes):
        def m(xi, j=j):
            rho = 2 * np.pi * np.sqrt(np.sum(xi * xi, axis=-1))
            return -(rho ** (delta - 2)) * 2j * np.pi * xi[..., j]
        term = apply_multiplier(w, m, "zero")
        total = term if total is None else total + term
    return total


def apply_forward(u: SpectralField, form: Form) -> SpectralField:
    """N(u) for the chosen form; every spatial product is dealiased, linear terms are exact."""
    if isinstance(form, LinearForm):
        return apply_multiplier(u, lambda xi: form.jacobian_symbol(xi), "zero")
    if isinstance(form, CompositionForm):
        z = power_series_eval(form.zeta, u, "nonlinear")
        p = power_series_eval(form.psi, u, "nonlinear")
        return apply_multiplier(z, lambda xi: -2j * np.pi * form.gamma * xi[..., 0], "zero") + apply_multiplier(
            p, lambda xi: phi_eval(form.spec, xi), "zero")
    if isinstance(form, DivergenceForm):
        z = power_series_eval(form.zeta, u, "nonlinear")
        grads = [_grad(u, j) for j in range(u.grid.d)]
        if form.psi is None:
            fluxes = grads
        else:
            p = power_series_eval(form.psi, u, "nonlinear")
            fluxes = [g + pointwise_product(p, g) for g in grads]
        drift = apply_multiplier(z, lambda xi: -2j * np.pi * form.gamma * xi[..., 0], "zero")
        return drift + _neg_frac_div(fluxes, form.delta)
    raise TypeError(f"unknown form {type(form).__name__}")


def _nonlinear_derivative(series: PowerSeries, up: np.ndarray, v: SpectralField) -> SpectralField:
    """Derivative of power_series_eval(series, u, "nonlinear") at u in direction v."""
    rest = forward_transform(v.grid, (series.derivative(up) - series.slope) * v.physical()).dealiased()
    return v * series.slope + rest


def apply_jacobian(u: SpectralField, v: SpectralField, form: Form) -> SpectralField:
    """DN(u) v, the exact derivative of the discrete operator in apply_forward."""
    if isinstance(form, LinearForm):
        return apply_forward(v, form)
    up = u.physical()
    zv = _nonlinear_derivative(form.zeta, up, v)
    drift = apply_multiplier(zv, lambda xi: -2j * np.pi * form.gamma * xi[..., 0], "zero")
    if isinstance(form, CompositionForm):
        pv = _nonlinear_derivative(form.psi, up, v)
        return drift + apply_multiplier(pv, lambda xi: phi_eval(form.spec, xi), "zero")
    if isinstance(form, DivergenceForm):
        d = u.grid.d
        gv = [_grad(v, j) for j in range(d)]
        if form.psi is None:
            fluxes = gv
        else:
            p = power_series_eval(form.psi, u, "nonlinear")
            pv = _nonlinear_derivative(form.psi, up, v)
            fluxes = [gv[j] + pointwise_product(p, gv[j]) + pointwise_product(pv, _grad(u, j)) for j in range(d)]
        return drift + _neg_frac_div(fluxes, form.delta)
    raise TypeError(f"unknown form {type(form).__name__}")


def series_radius(form: Form) -> float:
    if isinstance(form, LinearForm):
        return math.inf
    radii = [form.zeta.radius] + ([form.psi.radius] if form.psi is not None else [])
    return min(radii)


# ---------------------------------------------------------------------------
# linear solve


def solve_linear(f: SpectralField, gamma: float, beta: float, spec: SymbolSpec) -> SpectralField:
    """u_hat = f_hat / (-2 pi i gamma xi_1 + beta phi(xi)) off the zero mode."""
    _nonzero(gamma=gamma, beta=beta)
    return apply_multiplier(f, lambda xi: 1.0 / linear_symbol(gamma, beta, spec, xi), "error")


def solution_norm_ratio(f: SpectralField, gamma: float, beta: float, spec: SymbolSpec, p: SpaceParams) -> float:
    """||u||_{X^{s+sigma}} / ||f||_{H^s cap dot-H^{-r}} for u = solve_linear(f)."""
    u = solve_linear(f, gamma, beta, spec)
    num = weighted_norm(u, XWeight(p.with_s(p.s + spec.sigma)))
    return num / weighted_norm(f, IntersectionWeight(p.s, p.r))


def _invert_jacobian_at_zero(r: SpectralField, form: Form) -> SpectralField:
    return apply_multiplier(r, lambda xi: 1.0 / form.jacobian_symbol(xi), "zero")


# ---------------------------------------------------------------------------
# Newton


@dataclass(frozen=True)
class NewtonOptions:
    """Stopping and damping controls; the residual is measured in H^s cap dot-H^{-r}."""

    max_iterations: int = 50
    tolerance: float = 1e-12
    damping: float = 1.0
    jacobian: str = "frozen"
    s: float = 2.0
    r: float = 0.0
    gmres_rtol: float = 1e-13

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.jacobian not in ("frozen", "full"):
            raise ValueError("jacobian must be 'frozen' or 'full'")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


@dataclass
class ConvergenceTrace:
    residuals: list = field(default_factory=list)
    dampings: list = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.dampings)

    def ratios(self) -> np.ndarray:
        r = np.asarray(self.residuals)
        return r[1:] / r[:-1]

    def rows(self):
        """(iteration, residual, damping) with damping empty for the initial residual."""
        out = [(0, self.residuals[0], "")]
        out += [(i + 1, res, dmp) for i, (res, dmp) in enumerate(zip(self.residuals[1:], self.dampings))]
        return out


def _symmetrize(step: SpectralField, real: bool) -> SpectralField:
    if not real:
        return step
    c = step.coeffs
    return step.with_coeffs(0.5 * (c + np.conj(c[step.grid.reflection])), True)


def _full_step(u: SpectralField, res: SpectralField, form: Form, opts: NewtonOptions) -> SpectralField:
    grid = u.grid
    shape = grid.shape

    def matvec(x):
        v = SpectralField(grid, x.reshape(shape), False)
        return np.array(apply_jacobian(u, v, form).coeffs.ravel())

    def precond(x):
        v = SpectralField(grid, x.reshape(shape), False)
        return np.array(_invert_jacobian_at_zero(v, form).coeffs.ravel())

    n = grid.size
    A = LinearOperator((n, n), matvec=matvec, dtype=complex)
    M = LinearOperator((n, n), matvec=precond, dtype=complex)
    x, info = gmres(A, np.array(res.coeffs.ravel()), M=M, rtol=opts.gmres_rtol, atol=0.0, restart=60, maxiter=20)
    if info < 0:
        raise DivergenceError(f"GMRES failed with code {info}")
    return SpectralField(grid, x.reshape(shape), False)


def solve_nonlinear(f: SpectralField, form: Form, opts: NewtonOptions = NewtonOptions(),
                    u0: Optional[SpectralField] = None):
    """Damped Newton iteration u <- u - lam J^{-1}(N(u) - f) with J = DN(0) or DN(u).

    The damping starts at ``opts.damping`` each step and is halved up to six times
    while the residual grows. Returns ``(u, trace)``; raises DivergenceError when the
    residual grows on five consecutive steps.
    """
    if not f.has_zero_mean():
        raise DomainError(f"right-hand side has nonzero mean {f.mean_coefficient:.3e}")
    weight = IntersectionWeight(opts.s, opts.r)
    radius = series_radius(form)
    real = bool(f.hermitian)
    u = SpectralField.zeros(f.grid) if u0 is None else u0

    def residual(v):
        _check_radius(v.physical(), radius)
        rv = apply_forward(v, form) - f
        # a blown-up iterate gives inf here, which the caller reports as divergence
        with np.errstate(over="ignore", invalid="ignore"):
            return rv, weighted_norm(rv, weight)

    res, norm = residual(u)
    trace = ConvergenceTrace([norm], [])
    growth = 0
    for _ in range(opts.max_iterations):
        if norm <= opts.tolerance:
            trace.converged = True
            return u, trace
        if opts.jacobian == "frozen":
            step = _invert_jacobian_at_zero(res, form)
        else:
            step = _full_step(u, res, form, opts)
        step = _symmetrize(step, real)
        lam = opts.damping
        for _h in range(MAX_HALVINGS + 1):
            cand = u - step * lam
            cand_res, cand_norm = residual(cand)
            if cand_norm < norm or _h == MAX_HALVINGS:
                break
            lam /= 2
        if not math.isfinite(cand_norm):
            raise DivergenceError("residual is not finite", trace)
        growth = growth + 1 if cand_norm > norm else 0
        u, res, norm = cand, cand_res, cand_norm
        trace.residuals.append(norm)
        trace.dampings.append(lam)
        if growth >= GROWTH_LIMIT:
            raise DivergenceError(f"residual grew on {GROWTH_LIMIT} consecutive steps", trace)
    trace.converged = norm <= opts.tolerance
    return u, trace
