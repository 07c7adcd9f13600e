"""Exact Fourier-side data: piecewise constants on boxes, and ball indicators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from aniso.cubature import integrate_box


def box_distance_range(lo: np.ndarray, hi: np.ndarray):
    """Smallest and largest |xi| over the box [lo, hi]."""
    near = np.where((lo <= 0) & (hi >= 0), 0.0, np.minimum(np.abs(lo), np.abs(hi)))
    far = np.maximum(np.abs(lo), np.abs(hi))
    return float(np.sqrt(np.sum(near**2))), float(np.sqrt(np.sum(far**2)))


def ball_volume(d: int, radius: float = 1.0) -> float:
    from aniso.quadrature import sphere_area

    return sphere_area(d - 1) * radius**d / d


@dataclass(frozen=True, eq=False)
class RectangleSet:
    """Sum of c_k * chi_{box_k} over disjoint axis-aligned boxes in R^d.

    ``lo`` and ``hi`` have shape (K, d); ``values`` has shape (K,).
    """

    lo: np.ndarray
    hi: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        lo = np.atleast_2d(np.asarray(self.lo, float))
        hi = np.atleast_2d(np.asarray(self.hi, float))
        vals = np.atleast_1d(np.asarray(self.values, complex))
        if lo.shape != hi.shape or lo.shape[0] != vals.shape[0]:
            raise ValueError("box corners and values disagree in shape")
        if np.any(hi < lo):
            raise ValueError("box upper corner below lower corner")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_boxes(cls, boxes, values=None) -> "RectangleSet":
        """``boxes`` is a list of per-axis interval lists [(a1, b1), ..., (ad, bd)]."""
        arr = np.asarray(boxes, float)
        vals = np.ones(len(arr)) if values is None else values
        return cls(arr[..., 0], arr[..., 1], vals)

    @property
    def d(self) -> int:
        return self.lo.shape[1]

    @property
    def volumes(self) -> np.ndarray:
        return np.prod(self.hi - self.lo, axis=1)

    def reflected(self) -> "RectangleSet":
        """xi -> -xi with conjugated values."""
        return RectangleSet(-self.hi, -self.lo, np.conj(self.values))

    def union(self, other: "RectangleSet") -> "RectangleSet":
        return RectangleSet(np.vstack([self.lo, other.lo]), np.vstack([self.hi, other.hi]),
                            np.concatenate([self.values, other.values]))

    def hermitian_closure(self) -> "RectangleSet":
        return self.union(self.reflected())

    def is_disjoint(self) -> bool:
        for i in range(len(self.lo)):
            overlap = np.all((np.minimum(self.hi[i], self.hi[i + 1:]) - np.maximum(self.lo[i], self.lo[i + 1:])) > 0, axis=1)
            if np.any(overlap):
                return False
        return True

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        ref = self.reflected()
        for lo, hi, v in zip(ref.lo, ref.hi, ref.values):
            hit = np.all(np.isclose(self.lo, lo, atol=tol) & np.isclose(self.hi, hi, atol=tol), axis=1)
            if not np.any(hit) or abs(self.values[hit][0] - v) > tol * max(1, abs(v)):
                return False
        return True

    def __call__(self, xi) -> np.ndarray:
        xi = np.asarray(xi, float)
        out = np.zeros(xi.shape[:-1], dtype=complex)
        for lo, hi, v in zip(self.lo, self.hi, self.values):
            inside = np.all((xi >= lo) & (xi <= hi), axis=-1)
            out = np.where(inside, v, out)
        return out

    def max_radius(self) -> float:
        return max(box_distance_range(lo, hi)[1] for lo, hi in zip(self.lo, self.hi))

    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.values) * self.volumes))

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2 * self.volumes)))

    def sample(self, rng: np.random.Generator, size: int):
        """Uniform points on the support; returns (points, support volume)."""
        vols = self.volumes
        total = float(vols.sum())
        which = rng.choice(len(vols), size=size, p=vols / total)
        u = rng.random((size, self.d))
        return self.lo[which] + u * (self.hi[which] - self.lo[which]), total

    def shell_l2_norm(self, r_lo: float, r_hi: float, rng=None, samples: int = 200_000) -> float:
        """||F chi_{r_lo <= |xi| <= r_hi}||_{L^2}; exact for boxes inside or outside the shell."""
        total = 0.0
        for lo, hi, v in zip(self.lo, self.hi, self.values):
            near, far = box_distance_range(lo, hi)
            vol = float(np.prod(hi - lo))
            if near >= r_lo and far <= r_hi:
                frac = 1.0
            elif far < r_lo or near > r_hi:
                frac = 0.0
            else:
                def ind(x):
                    rr = np.sqrt(np.sum(x * x, axis=-1))
                    return ((rr >= r_lo) & (rr <= r_hi)).astype(float)
                if rng is None:
                    frac = integrate_box(ind, lo, hi, rtol=1e-4, order=4, max_boxes=2000)[0] / vol
                else:
                    u = lo + rng.random((samples, self.d)) * (hi - lo)
                    frac = float(ind(u).mean())
            total += abs(v) ** 2 * vol * frac
        return float(np.sqrt(total))


@dataclass(frozen=True)
class BallIndicator:
    """value * chi_{B(0, radius)} in R^d."""

    d: int
    radius: float = 1.0
    value: float = 1.0

    def __call__(self, xi) -> np.ndarray:
        xi = np.asarray(xi, float)
        return np.where(np.sum(xi * xi, axis=-1) < self.radius**2, self.value, 0.0)

    def max_radius(self) -> float:
        return self.radius

    def l2_norm(self) -> float:
        return abs(self.value) * np.sqrt(ball_volume(self.d, self.radius))

    def sample(self, rng: np.random.Generator, size: int):
        return sample_shell(rng, self.d, 0.0, self.radius, size), ball_volume(self.d, self.radius)

    def shell_l2_norm(self, r_lo: float, r_hi: float, rng=None, samples: int = 0) -> float:
        hi = min(r_hi, self.radius)
        lo = min(r_lo, hi)
        return abs(self.value) * np.sqrt(ball_volume(self.d, hi) - ball_volume(self.d, lo))


def sample_shell(rng: np.random.Generator, d: int, r_lo: float, r_hi: float, size: int) -> np.ndarray:
    """Uniform points in {r_lo < |x| <= r_hi} in R^d."""
    g = rng.standard_normal((size, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    u = rng.random(size)
    rad = (r_lo**d + u * (r_hi**d - r_lo**d)) ** (1.0 / d)
    return g * rad[:, None]


def shell_volume(d: int, r_lo: float, r_hi: float) -> float:
    return ball_volume(d, r_hi) - ball_volume(d, r_lo)
