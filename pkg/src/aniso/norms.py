"""Norms of grid fields and rectangle data, the frequency split, and inequality ratios."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from aniso.cubature import integrate_box
from aniso.errors import DomainError, PreconditionError
from aniso.multipliers import SpaceParams, SymbolSpec, omega_weight, phi_eval
from aniso.rectangles import RectangleSet, box_distance_range
from aniso.spectral import SpectralField, apply_multiplier, pointwise_product

RECT_RTOL = 1e-10


def _rho2(xi):
    return np.sum(np.asarray(xi) ** 2, axis=-1)


@dataclass(frozen=True)
class XWeight:
    """omega_{s,r,delta} with the low/high split at radius R."""

    params: SpaceParams
    R: float = 1.0
    allow_isotropic: bool = False

    def __post_init__(self):
        if self.params.delta <= 1 and not self.allow_isotropic:
            raise ValueError("X weight needs delta > 1")

    @property
    def singular_at_origin(self) -> bool:
        return self.params.r > 0

    def __call__(self, xi):
        return omega_weight(self.params, xi, self.R)


@dataclass(frozen=True)
class HsWeight:
    s: float
    singular_at_origin = False

    def __call__(self, xi):
        return (1.0 + _rho2(xi)) ** self.s


@dataclass(frozen=True)
class HomogDotWeight:
    """|xi|^{2 sigma}."""

    sigma: float

    @property
    def singular_at_origin(self) -> bool:
        return self.sigma < 0

    def __call__(self, xi):
        return _rho2(xi) ** self.sigma


@dataclass(frozen=True)
class BihomogWeight:
    """|xi|^{2 lam} on B(0,1), |xi|^{2 rho} outside."""

    lam: float
    rho: float

    @property
    def singular_at_origin(self) -> bool:
        return self.lam < 0

    def __call__(self, xi):
        r2 = _rho2(xi)
        return np.where(r2 < 1, r2**self.lam, r2**self.rho)


@dataclass(frozen=True)
class IntersectionWeight:
    """H^s cap dot-H^{-r}: |xi|^{-2r} on B(0,1), <xi>^{2s} outside."""

    s: float
    r: float

    @property
    def singular_at_origin(self) -> bool:
        return self.r > 0

    def __call__(self, xi):
        r2 = _rho2(xi)
        with np.errstate(divide="ignore"):
            return np.where(r2 < 1, r2 ** (-self.r), (1.0 + r2) ** self.s)


@dataclass(frozen=True)
class FourierL1:
    """||f_hat||_{L^1} over B(0, radius), or over all of R^d when radius is None."""

    radius: Optional[float] = None
    singular_at_origin = False


WeightSpec = Union[XWeight, HsWeight, HomogDotWeight, BihomogWeight, IntersectionWeight, FourierL1]


def _grid_weight(f: SpectralField, w) -> np.ndarray:
    try:
        return _cached_grid_weight(f.grid, w)
    except TypeError:  # unhashable weight
        return _grid_weight_values(f.grid, w)


@lru_cache(maxsize=64)
def _cached_grid_weight(grid, w) -> np.ndarray:
    vals = _grid_weight_values(grid, w)
    vals.setflags(write=False)
    return vals


def _grid_weight_values(grid, w) -> np.ndarray:
    vals = np.zeros(grid.shape)
    nz = ~grid.zero_mask
    vals[nz] = w(grid.frequencies[nz])
    if not w.singular_at_origin:
        vals[grid.zero_mask] = w(grid.frequencies[grid.zero_mask])
    return vals


def weighted_norm(f, w: WeightSpec) -> float:
    """sqrt(int w |f_hat|^2): a Riemann sum for grid fields, adaptive quadrature for rectangles."""
    if isinstance(f, RectangleSet):
        return _rectangle_norm(f, w)
    if getattr(w, "singular_at_origin", False) and not f.has_zero_mean():
        raise DomainError(f"weight is singular at the origin and the field mean is {f.mean_coefficient:.3e}")
    a2 = np.abs(f.coeffs) ** 2
    if isinstance(w, FourierL1):
        sel = np.ones(f.grid.shape, bool) if w.radius is None else f.grid.freq_norm < w.radius
        return float(np.sum(np.sqrt(a2[sel])) * f.grid.cell_volume)
    return float(np.sqrt(np.sum(_grid_weight(f, w) * a2) * f.grid.cell_volume))


def box_weight_integral(w, lo, hi, rtol: float = RECT_RTOL) -> float:
    """int_box w(xi) d xi; the box is split at the weight's branch radius when it straddles it."""
    return integrate_box(w, lo, hi, rtol=rtol)[0]


def _rectangle_norm(F: RectangleSet, w, rtol: float = RECT_RTOL) -> float:
    total = 0.0
    for lo, hi, v in zip(F.lo, F.hi, F.values):
        if v == 0:
            continue
        if isinstance(w, FourierL1):
            vol = float(np.prod(hi - lo))
            if w.radius is None:
                frac = 1.0
            else:
                near, far = box_distance_range(lo, hi)
                if far < w.radius:
                    frac = 1.0
                elif near >= w.radius:
                    frac = 0.0
                else:
                    ind = lambda x: (_rho2(x) < w.radius**2).astype(float)  # noqa: E731
                    frac = integrate_box(ind, lo, hi, rtol=1e-6, order=4)[0] / vol
            total += abs(v) * vol * frac
            continue
        near, _ = box_distance_range(lo, hi)
        if near == 0 and getattr(w, "singular_at_origin", False):
            raise DomainError("box touches the origin where the weight is singular")
        total += abs(v) ** 2 * box_weight_integral(w, lo, hi, rtol)
    return float(total if isinstance(w, FourierL1) else np.sqrt(total))


def split_low_high(f: SpectralField, R: float = 1.0):
    """(f_low, f_high) with f_low = chi_{|xi| < R} f_hat and f_high the rest."""
    if not R > 0:
        raise ValueError("split radius must be positive")
    low = f.grid.freq_norm < R
    flo = f.with_coeffs(np.where(low, f.coeffs, 0), True if f.hermitian else None)
    fhi = f.with_coeffs(np.where(low, 0, f.coeffs), True if f.hermitian else None)
    return flo, fhi


def _require(p: SpaceParams, *names: str):
    bad = p.violations(*names)
    if bad:
        raise PreconditionError("precondition violated: " + "; ".join(bad))


def _nonzero_mean_zero(f: SpectralField, name: str = "f"):
    if not np.any(f.coeffs):
        raise PreconditionError(f"{name} must be nonzero")
    if not f.has_zero_mean():
        raise PreconditionError(f"{name} must have zero mean")


def fourier_l1_bound_ratio(f: SpectralField, p: SpaceParams) -> float:
    """||f_hat||_{L^1} / ||f||_X; bounded when X is complete and s > d/2."""
    _require(p, "is_complete", "s_gt_half_d")
    _nonzero_mean_zero(f)
    return weighted_norm(f, FourierL1()) / weighted_norm(f, XWeight(p))


def product_ratio_Hs(f: SpectralField, g: SpectralField, p: SpaceParams) -> float:
    """||f g||_{H^s} / (||f||_X ||g||_{H^s}) with the dealiased product."""
    _require(p, "is_complete", "s_gt_half_d")
    hs = HsWeight(p.s)
    den = weighted_norm(f, XWeight(p)) * weighted_norm(g, hs)
    if den == 0:
        raise DomainError("zero denominator in product ratio")
    return weighted_norm(pointwise_product(f, g), hs) / den


def derivative_ratio(f: SpectralField, p: SpaceParams, tau: float, spec: Optional[SymbolSpec] = None) -> float:
    """(||D^tau f||_{H^{s-tau}} + ||d_1 f||_{dot-H^{-r}}) / ||f||_X.

    D^tau is (-Delta)^{tau/2} with symbol (2 pi |xi|)^tau. When ``spec`` is given,
    phi(D) replaces it, tau is taken as the symbol's low order and the target
    space is H^{s - sigma}.
    """
    if spec is not None:
        tau = spec.delta
        if spec.sigma > p.s:
            raise PreconditionError(f"precondition violated: sigma <= s (sigma={spec.sigma}, s={p.s})")
    if not (p.delta - p.r <= tau <= p.s) and spec is None:
        raise PreconditionError(f"precondition violated: delta - r <= tau <= s (tau={tau}, delta-r={p.delta - p.r:g}, s={p.s})")
    if spec is not None and tau < p.delta - p.r:
        raise PreconditionError(f"precondition violated: delta - r <= tau (tau={tau})")
    if 1 - p.r > p.s:
        raise PreconditionError(f"precondition violated: 1 - r <= s (1-r={1 - p.r:g}, s={p.s})")
    if spec is None:
        sym = lambda xi: (2 * np.pi * np.sqrt(_rho2(xi))) ** tau  # noqa: E731
        target = HsWeight(p.s - tau)
    else:
        sym = lambda xi: phi_eval(spec, xi)  # noqa: E731
        target = HsWeight(p.s - spec.sigma)
    d1 = apply_multiplier(f, lambda xi: 2j * np.pi * xi[..., 0], "zero")
    num = weighted_norm(apply_multiplier(f, sym, "zero"), target) + weighted_norm(d1, HomogDotWeight(-p.r))
    den = weighted_norm(f, XWeight(p))
    if den == 0:
        raise DomainError("zero denominator in derivative ratio")
    return num / den
