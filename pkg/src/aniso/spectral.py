"""Periodic grids, transforms, multipliers and dealiased products.

A field on the torus [0, L)^d sampled at n^d points stands in for a function on
R^d. Its coefficients approximate the continuum transform at xi = k / L::

    f_hat(k / L) ~= (L / n)^d * fftn(samples)[k]

so Riemann sums over the grid with cell volume L^{-d} reproduce Fourier-side
integrals, and Plancherel holds exactly in discrete form. Coefficient arrays are
kept in numpy FFT order.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from aniso.errors import DomainError

HERMITIAN_RTOL = 1e-12


@dataclass(frozen=True)
class SpectralGrid:
    d: int
    n: int
    L: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if int(self.n) != self.n or self.n < 4 or self.n % 2:
            raise ValueError(f"points per axis must be an even integer >= 4, got {self.n}")
        if not self.L > 0:
            raise ValueError(f"box length must be positive, got {self.L}")

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n**self.d

    @property
    def cell_volume(self) -> float:
        """Fourier-side Riemann-sum weight L^{-d}."""
        return float(self.L) ** (-self.d)

    @cached_property
    def axis_indices(self) -> np.ndarray:
        """Integer mode indices per axis in FFT order; the set is [-n/2, n/2)."""
        return np.fft.fftfreq(self.n, 1.0 / self.n).astype(int)

    @property
    def axis_frequencies(self) -> np.ndarray:
        return self.axis_indices / self.L

    @cached_property
    def indices(self) -> np.ndarray:
        """Integer multi-indices, shape (n,)*d + (d,)."""
        grids = np.meshgrid(*([self.axis_indices] * self.d), indexing="ij")
        return np.stack(grids, axis=-1)

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Physical frequencies k / L, shape (n,)*d + (d,)."""
        return self.indices / self.L

    @cached_property
    def freq_norm(self) -> np.ndarray:
        return np.sqrt(np.sum(self.frequencies**2, axis=-1))

    @cached_property
    def points(self) -> np.ndarray:
        """Physical sample points j L / n, shape (n,)*d + (d,)."""
        x = np.arange(self.n) * (self.L / self.n)
        return np.stack(np.meshgrid(*([x] * self.d), indexing="ij"), axis=-1)

    @cached_property
    def zero_mask(self) -> np.ndarray:
        m = np.zeros(self.shape, dtype=bool)
        m[(0,) * self.d] = True
        return m

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """True on modes kept by the two-thirds rule (every |k_i| < n/3)."""
        keep = np.abs(self.axis_indices) < self.n / 3
        m = keep
        for _ in range(self.d - 1):
            m = np.logical_and.outer(m, keep)
        return np.asarray(m, dtype=bool)

    @cached_property
    def reflection(self) -> tuple:
        """Index arrays mapping each mode k to -k (mod n)."""
        idx = (-np.arange(self.n)) % self.n
        return np.ix_(*([idx] * self.d))

    @property
    def transform_scale(self) -> float:
        return (self.L / self.n) ** self.d


def make_grid(d: int, n: int, L: float) -> SpectralGrid:
    return SpectralGrid(d, n, float(L))


def is_hermitian(grid: SpectralGrid, coeffs: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    scale = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    if scale == 0:
        return True
    return bool(np.max(np.abs(coeffs[grid.reflection] - np.conj(coeffs))) <= rtol * scale)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier data on a grid; ``hermitian`` is True iff the field is real-valued."""

    grid: SpectralGrid
    coeffs: np.ndarray
    hermitian: Optional[bool] = field(default=None)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != self.grid.shape:
            raise ValueError(f"coefficient shape {c.shape} does not match grid {self.grid.shape}")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if self.hermitian is None:
            object.__setattr__(self, "hermitian", is_hermitian(self.grid, c))

    @classmethod
    def zeros(cls, grid: SpectralGrid) -> "SpectralField":
        return cls(grid, np.zeros(grid.shape, dtype=complex), True)

    @classmethod
    def from_function(cls, grid: SpectralGrid, func: Callable[[np.ndarray], np.ndarray]) -> "SpectralField":
        """Transform ``func`` sampled at the grid points (``func`` receives shape (..., d))."""
        return forward_transform(grid, func(grid.points))

    @property
    def mean_coefficient(self) -> complex:
        return complex(self.coeffs[(0,) * self.grid.d])

    def has_zero_mean(self, rtol: float = 1e-12) -> bool:
        scale = max(np.max(np.abs(self.coeffs)), np.finfo(float).tiny)
        return abs(self.mean_coefficient) <= rtol * scale

    def with_coeffs(self, coeffs: np.ndarray, hermitian: Optional[bool] = None) -> "SpectralField":
        return SpectralField(self.grid, coeffs, hermitian)

    def physical(self) -> np.ndarray:
        return inverse_transform(self)

    def dealiased(self) -> "SpectralField":
        return self.with_coeffs(np.where(self.grid.dealias_mask, self.coeffs, 0), self.hermitian)

    def _check(self, other: "SpectralField"):
        if not isinstance(other, SpectralField):
            return NotImplemented
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self.with_coeffs(self.coeffs + other.coeffs, self.hermitian and other.hermitian or None)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self.with_coeffs(self.coeffs - other.coeffs, self.hermitian and other.hermitian or None)

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        real = np.isreal(c) and self.hermitian
        return self.with_coeffs(self.coeffs * c, True if real else None)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def forward_transform(grid: SpectralGrid, samples) -> SpectralField:
    samples = np.asarray(samples)
    if samples.size != grid.size:
        raise ValueError(f"expected {grid.size} samples, got {samples.size}")
    samples = samples.reshape(grid.shape)
    coeffs = np.fft.fftn(samples) * grid.transform_scale
    hermitian = bool(np.isrealobj(samples) or np.all(samples.imag == 0)) or None
    return SpectralField(grid, coeffs, hermitian)


def inverse_transform(f: SpectralField) -> np.ndarray:
    """Physical samples; real-valued array when the field is hermitian."""
    out = np.fft.ifftn(f.coeffs) / f.grid.transform_scale
    if f.hermitian:
        return out.real.copy()
    return out


def plane_wave(grid: SpectralGrid, k) -> SpectralField:
    """Transform of the unit plane wave exp(2 pi i k.x / L) for integer index k."""
    c = np.zeros(grid.shape, dtype=complex)
    c[tuple(np.asarray(k) % grid.n)] = grid.L**grid.d
    return SpectralField(grid, c)


ZERO_MODE_POLICIES = ("zero", "keep", "error")


def multiplier_values(grid: SpectralGrid, m: Callable, zero_mode_policy: str = "error") -> np.ndarray:
    """Evaluate ``m`` on the grid frequencies; the zero mode is evaluated only under ``keep``."""
    if zero_mode_policy not in ZERO_MODE_POLICIES:
        raise ValueError(f"zero_mode_policy must be one of {ZERO_MODE_POLICIES}")
    vals = np.zeros(grid.shape, dtype=complex)
    nz = ~grid.zero_mask
    vals[nz] = m(grid.frequencies[nz])
    if zero_mode_policy == "keep":
        vals[grid.zero_mask] = m(grid.frequencies[grid.zero_mask])
    if not np.all(np.isfinite(vals)):
        raise DomainError("multiplier is not finite at every nonzero grid frequency")
    return vals


def apply_multiplier(f: SpectralField, m: Callable, zero_mode_policy: str = "error") -> SpectralField:
    """Multiply coefficients by m(xi).

    ``zero``: output zero mode is 0. ``keep``: m is evaluated at xi = 0 too.
    ``error``: a nonzero mean raises DomainError, otherwise the zero mode is 0.
    """
    vals = multiplier_values(f.grid, m, zero_mode_policy)
    if zero_mode_policy == "error" and not f.has_zero_mean():
        raise DomainError(f"field has nonzero mean {f.mean_coefficient:.3e} and the multiplier is singular at 0")
    out = f.coeffs * vals
    hermitian = True if f.hermitian and is_hermitian(f.grid, out) else None
    return f.with_coeffs(out, hermitian)


def pointwise_product(f: SpectralField, g: SpectralField) -> SpectralField:
    """Fourier data of f * g with the two-thirds rule applied to inputs and output."""
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    grid = f.grid
    mask = grid.dealias_mask
    fp = np.fft.ifftn(np.where(mask, f.coeffs, 0))
    gp = np.fft.ifftn(np.where(mask, g.coeffs, 0))
    # fp, gp are physical samples times (L/n)^d
    coeffs = np.fft.fftn(fp * gp) / grid.transform_scale
    coeffs = np.where(mask, coeffs, 0)
    both_real = f.hermitian and g.hermitian
    if both_real:
        # symmetrize round-off so the flag stays exact
        coeffs = 0.5 * (coeffs + np.conj(coeffs[grid.reflection]))
    return SpectralField(grid, coeffs, True if both_real else None)


def resample(f: SpectralField, n: int) -> SpectralField:
    """The same field on an n-point grid: modes with |k_i| < min(n, f.grid.n) / 2 are kept, the rest are zero."""
    grid = make_grid(f.grid.d, n, f.grid.L)
    half = min(n, f.grid.n) // 2
    keep = np.arange(-half + 1, half)
    src = np.ix_(*([keep % f.grid.n] * grid.d))
    dst = np.ix_(*([keep % n] * grid.d))
    c = np.zeros(grid.shape, dtype=complex)
    c[dst] = f.coeffs[src]
    return SpectralField(grid, c, True if f.hermitian else None)


def l2_norm(f: SpectralField) -> float:
    """Fourier-side L^2 norm (Riemann sum with cell volume L^{-d})."""
    return float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2) * f.grid.cell_volume))


def physical_l2_norm(samples: np.ndarray, grid: SpectralGrid) -> float:
    return float(np.sqrt(np.sum(np.abs(samples) ** 2) * (grid.L / grid.n) ** grid.d))


def random_field(
    grid: SpectralGrid,
    decay: float,
    rng: np.random.Generator,
    band_limited: bool = False,
) -> SpectralField:
    """Hermitian mean-zero field with i.i.d. complex Gaussian coefficients times <xi>^{-decay}.

    Nyquist modes are zeroed so odd multipliers keep the field real.
    """
    z = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    z = 0.5 * (z + np.conj(z[grid.reflection]))
    z *= (1.0 + grid.freq_norm**2) ** (-decay / 2)
    z[grid.zero_mask] = 0
    nyq = np.any(grid.indices == -grid.n // 2, axis=-1)
    z[nyq] = 0
    if band_limited:
        z[~grid.dealias_mask] = 0
    return SpectralField(grid, z, True)


def write_field_csv(f: SpectralField, path) -> None:
    """Rows of (k_1..k_d, re, im) with k in natural order; grid on a leading comment line."""
    grid = f.grid
    order = np.argsort(grid.axis_indices, kind="stable")
    with open(path, "w", newline="") as fh:
        fh.write(f"# grid d={grid.d} n={grid.n} L={grid.L!r}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"k{i + 1}" for i in range(grid.d)] + ["re", "im"])
        for pos in itertools.product(order, repeat=grid.d):
            c = f.coeffs[pos]
            k = [int(grid.axis_indices[p]) for p in pos]
            w.writerow(k + [repr(float(c.real)), repr(float(c.imag))])


def read_field_csv(path) -> SpectralField:
    with open(path, newline="") as fh:
        head = fh.readline().strip()
        if not head.startswith("# grid"):
            raise ValueError("missing grid comment line")
        kv = dict(item.split("=") for item in head[len("# grid"):].split())
        grid = make_grid(int(kv["d"]), int(kv["n"]), float(kv["L"]))
        r = csv.reader(fh)
        next(r)
        coeffs = np.zeros(grid.shape, dtype=complex)
        for row in r:
            k = tuple(int(v) % grid.n for v in row[: grid.d])
            coeffs[k] = complex(float(row[grid.d]), float(row[grid.d + 1]))
    return SpectralField(grid, coeffs)
