"""Pointwise Fourier-side weights and symbols.

Frequencies are arrays of shape ``(..., d)`` in cycles per unit length, so the
Fourier transform is ``f_hat(xi) = int f(x) exp(-2 pi i x.xi) dx``. Every
function here is vectorized over the leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from aniso.errors import DomainError

# default sample windows for checking bihomogeneity of a symbol
XI_LO = 0.1
XI_HI = 10.0


@dataclass(frozen=True)
class SpaceParams:
    """Parameters (s, r, delta) of X^s_{r,delta}(R^d) and its region predicates."""

    s: float
    r: float
    delta: float
    d: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.d}")

    @property
    def anisotropic(self) -> bool:
        return self.delta > 1 and self.d >= 2

    @property
    def is_complete(self) -> bool:
        return 1 + self.delta - 2 * self.r < self.d

    @property
    def embeds_Hs(self) -> bool:
        return self.r <= 1

    @property
    def is_algebra(self) -> bool:
        return (
            self.is_complete
            and self.r <= 1
            and self.s > self.d / 2
            and (self.d >= 3 or self.delta <= 2)
        )

    @property
    def schwartz_included(self) -> bool:
        return self.r < (2 + self.d) / 2

    def with_s(self, s: float) -> "SpaceParams":
        return SpaceParams(s, self.r, self.delta, self.d)

    def violations(self, *names: str) -> list[str]:
        """Human-readable inequalities among ``names`` that fail."""
        checks = {
            "anisotropic": (self.anisotropic, f"delta > 1 and d >= 2 (delta={self.delta}, d={self.d})"),
            "is_complete": (self.is_complete, f"d > 1 + delta - 2r (d={self.d}, 1+delta-2r={1 + self.delta - 2 * self.r:g})"),
            "embeds_Hs": (self.embeds_Hs, f"r <= 1 (r={self.r})"),
            "s_gt_half_d": (self.s > self.d / 2, f"s > d/2 (s={self.s}, d/2={self.d / 2:g})"),
            "is_algebra": (self.is_algebra, "d > 1+delta-2r, r <= 1, s > d/2 and (d >= 3 or delta <= 2)"),
        }
        return [checks[n][1] for n in names if not checks[n][0]]


@dataclass(frozen=True)
class SymbolSpec:
    """Bihomogeneous symbol phi: ~ low_const |xi|^delta near 0, ~ high_const |xi|^sigma at infinity.

    ``kind`` is one of ``"fractional-power"`` ((2 pi |xi|)^delta, sigma = delta),
    ``"gravity-tanh"`` (|xi| tanh |xi|, delta = 2, sigma = 1) or
    ``"custom-bihomogeneous"`` with a radial ``profile`` callable of |xi|.
    """

    kind: str
    delta: float
    sigma: float
    low_const: float = 1.0
    high_const: float = 1.0
    profile: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.kind not in ("fractional-power", "gravity-tanh", "custom-bihomogeneous"):
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if not self.delta > 1:
            raise ValueError(f"symbol low-frequency order must exceed 1, got {self.delta}")
        if self.low_const <= 0 or self.high_const <= 0:
            raise ValueError("bihomogeneity constants must be positive")
        if self.kind == "custom-bihomogeneous" and self.profile is None:
            raise ValueError("custom symbol needs a radial profile")

    @classmethod
    def fractional_power(cls, delta: float) -> "SymbolSpec":
        c = (2 * np.pi) ** delta
        return cls("fractional-power", delta, delta, c, c)

    @classmethod
    def gravity_tanh(cls) -> "SymbolSpec":
        return cls("gravity-tanh", 2.0, 1.0, 1.0, 1.0)

    @classmethod
    def custom(cls, profile, delta, sigma, low_const=1.0, high_const=1.0) -> "SymbolSpec":
        return cls("custom-bihomogeneous", delta, sigma, low_const, high_const, profile)


def _as_freq(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if xi.ndim == 0:
        raise ValueError("frequency must have at least one component")
    if not np.all(np.isfinite(xi)):
        raise ValueError("frequency components must be finite")
    return xi


def bracket(xi) -> np.ndarray:
    """<xi> = sqrt(1 + |xi|^2)."""
    xi = _as_freq(xi)
    return np.sqrt(1.0 + np.sum(xi * xi, axis=-1))


def low_weight(xi, r: float, delta: float) -> np.ndarray:
    """(xi_1^2 + |xi|^{2 delta}) / |xi|^{2r}; the caller excludes xi = 0."""
    xi = _as_freq(xi)
    rho2 = np.sum(xi * xi, axis=-1)
    return (xi[..., 0] ** 2 + rho2**delta) / rho2**r


def omega_weight(p: SpaceParams, xi, R: float = 1.0) -> np.ndarray:
    """The X^s_{r,delta} weight. |xi| < R uses the anisotropic branch, |xi| >= R uses <xi>^{2s}."""
    xi = _as_freq(xi)
    if xi.shape[-1] != p.d:
        raise ValueError(f"frequency has {xi.shape[-1]} components, expected {p.d}")
    rho2 = np.sum(xi * xi, axis=-1)
    low = rho2 < R * R
    if p.r > 0 and np.any(low & (rho2 == 0)):
        raise DomainError("omega weight is degenerate at the origin for r > 0")
    out = (1.0 + rho2) ** p.s
    if np.any(low):
        xl = xi[low]
        with np.errstate(divide="ignore", invalid="ignore"):
            w = low_weight(xl, p.r, p.delta)
        # r <= 0: numerator vanishes at the origin faster than the denominator
        w = np.where(np.sum(xl * xl, axis=-1) == 0, 0.0, w)
        out = np.array(out, dtype=float, copy=True)
        out[low] = w
    return out


def mu_weight(r: float, delta: float, xi) -> np.ndarray:
    """(|xi_1| + |xi|^delta) / |xi|^r, comparable to sqrt(omega) on the unit ball."""
    xi = _as_freq(xi)
    rho = np.sqrt(np.sum(xi * xi, axis=-1))
    if np.any(rho == 0):
        raise DomainError("mu weight is undefined at xi = 0")
    return (np.abs(xi[..., 0]) + rho**delta) / rho**r


def phi_eval(spec: SymbolSpec, xi) -> np.ndarray:
    xi = _as_freq(xi)
    rho = np.sqrt(np.sum(xi * xi, axis=-1))
    if spec.kind == "fractional-power":
        return (2 * np.pi * rho) ** spec.delta
    if spec.kind == "gravity-tanh":
        return rho * np.tanh(rho)
    return np.asarray(spec.profile(rho), dtype=float)


def linear_symbol(gamma: float, beta: float, spec: SymbolSpec, xi) -> np.ndarray:
    """-2 pi i gamma xi_1 + beta phi(xi), the Fourier symbol of -gamma d_1 + beta phi(D)."""
    xi = _as_freq(xi)
    return -2j * np.pi * gamma * xi[..., 0] + beta * phi_eval(spec, xi)


def bihomogeneity_bounds(spec: SymbolSpec, xi_lo: float = XI_LO, xi_hi: float = XI_HI, samples: int = 200):
    """Observed ranges of phi/(C0 |xi|^delta) on (0, xi_lo] and phi/(C1 |xi|^sigma) on [xi_hi, 100 xi_hi].

    Radial sampling along e_1; returns ``((lo_min, lo_max), (hi_min, hi_max))``.
    """
    lo = np.geomspace(xi_lo * 1e-4, xi_lo, samples)
    hi = np.geomspace(xi_hi, 100 * xi_hi, samples)
    z = np.zeros(samples)
    lo_ratio = phi_eval(spec, np.stack([lo, z], -1)) / (spec.low_const * lo**spec.delta)
    hi_ratio = phi_eval(spec, np.stack([hi, z], -1)) / (spec.high_const * hi**spec.sigma)
    return (lo_ratio.min(), lo_ratio.max()), (hi_ratio.min(), hi_ratio.max())
