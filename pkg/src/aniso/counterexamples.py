"""Witness families built from boxes on the Fourier side, and estimators for the
trilinear functional

    I(F, G, H) = int_{B(0,1)^2} mu(xi + eta) / (mu(xi) mu(eta)) F(xi) G(eta) H(xi + eta)

together with its near-diagonal dyadic pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from aniso.cubature import clip_halfplane, polygon_rule, split_polygon
from aniso.errors import PreconditionError
from aniso.multipliers import SpaceParams
from aniso.norms import XWeight, weighted_norm
from aniso.rectangles import BallIndicator, RectangleSet, sample_shell, shell_volume

MC_OVERSAMPLING = 10
MC_MAX_PROPOSALS = 1_000_000


# ---------------------------------------------------------------------------
# regions of B(0,1)^2


def _norm(x):
    return np.sqrt(np.sum(np.asarray(x, float) ** 2, axis=-1))


def in_unit_balls(xi, eta) -> np.ndarray:
    return (_norm(xi) < 1) & (_norm(eta) < 1)


def in_E0(xi, eta) -> np.ndarray:
    """|xi| + |eta| <= 3 ||xi| - |eta|| inside B(0,1)^2: the two frequencies have very different sizes."""
    a, b = _norm(xi), _norm(eta)
    return in_unit_balls(xi, eta) & (a + b <= 3 * np.abs(a - b))


def in_E1(xi, eta) -> np.ndarray:
    """Complement of E0 in B(0,1)^2, equivalently |eta|/2 < |xi| < 2|eta|."""
    a, b = _norm(xi), _norm(eta)
    return in_unit_balls(xi, eta) & (a + b > 3 * np.abs(a - b))


REGIONS = {"E0": in_E0, "E1": in_E1}


@dataclass(frozen=True)
class DyadicRegion:
    """E_{m,n}: pairs in E1 with 2^{-m-1} < |xi| <= 2^{-m} and 2^{-n+1} < |xi + eta| <= 2^{-n+2}."""

    m: int
    n: int

    def __post_init__(self):
        for name in ("m", "n"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {v}")
        if self.n < self.m:
            raise PreconditionError(f"dyadic region needs n >= m, got m={self.m}, n={self.n}")

    @property
    def xi_shell(self):
        return 2.0 ** (-self.m - 1), 2.0 ** (-self.m)

    @property
    def sum_shell(self):
        return 2.0 ** (-self.n + 1), 2.0 ** (-self.n + 2)

    def contains(self, xi, eta) -> np.ndarray:
        a = _norm(xi)
        c = _norm(np.asarray(xi) + np.asarray(eta))
        (alo, ahi), (clo, chi) = self.xi_shell, self.sum_shell
        return in_E1(xi, eta) & (a > alo) & (a <= ahi) & (c > clo) & (c <= chi)


# ---------------------------------------------------------------------------
# completeness and rotation witnesses


@dataclass(frozen=True)
class RotationSpec:
    """An orthogonal matrix Q, used through xi -> Q^T xi."""

    Q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.Q, float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError("Q must be a square matrix")
        if np.max(np.abs(q.T @ q - np.eye(len(q)))) > 1e-12:
            raise ValueError("Q is not orthogonal to 1e-12")
        object.__setattr__(self, "Q", q)

    @classmethod
    def plane_rotation(cls, d: int, i: int, j: int, angle: float) -> "RotationSpec":
        q = np.eye(d)
        c, s = math.cos(angle), math.sin(angle)
        q[i, i], q[i, j], q[j, i], q[j, j] = c, -s, s, c
        # exact zeros keep sign ties deterministic
        q[np.abs(q) < 1e-15] = 0.0
        return cls(q)

    @property
    def d(self) -> int:
        return len(self.Q)

    @property
    def overlap(self) -> float:
        """|Q e_1 . e_1|."""
        return abs(self.Q[0, 0])

    @property
    def signs(self) -> np.ndarray:
        """sign of each component of Q e_1, with ties sent to +1."""
        return np.where(self.Q[:, 0] >= 0, 1.0, -1.0)


@dataclass(frozen=True)
class RotatedWeight:
    """xi -> w(Q^T xi)."""

    base: object
    Q: np.ndarray

    @property
    def singular_at_origin(self) -> bool:
        return self.base.singular_at_origin

    def __call__(self, xi):
        return self.base(np.asarray(xi, float) @ self.Q)


def feps_family(eps: float, d: int, delta: float, signs=None) -> RectangleSet:
    """F_eps = chi_R + chi_{-R}, R = [eps^delta/2, 3 eps^delta/2] x [eps/2, 3 eps/2]^{d-1}, axes flipped by ``signs``."""
    if not 0 < eps < 2 / (3 * math.sqrt(d)):
        raise ValueError(f"eps must lie in (0, 2/(3 sqrt d)) = (0, {2 / (3 * math.sqrt(d)):.6g}), got {eps}")
    signs = np.ones(d) if signs is None else np.asarray(signs, float)
    a = np.array([eps**delta / 2] + [eps / 2] * (d - 1))
    b = 3 * a
    lo = np.where(signs > 0, a, -b)
    hi = np.where(signs > 0, b, -a)
    return RectangleSet(np.vstack([lo, -hi]), np.vstack([hi, -lo]), np.ones(2))


@dataclass(frozen=True)
class FepsNorms:
    l1: float
    l2: float
    x_norm: float


def feps_norms(eps: float, p: SpaceParams) -> FepsNorms:
    """L^1, L^2 and X norms of F_eps, by exact box volumes and adaptive cubature."""
    bad = p.violations("anisotropic")
    if bad:
        raise PreconditionError("precondition violated: " + "; ".join(bad))
    F = feps_family(eps, p.d, p.delta)
    return FepsNorms(F.l1_norm(), F.l2_norm(), weighted_norm(F, XWeight(p)))


def start_index(d: int) -> int:
    """Smallest K with 4^K > 3 sqrt(d) / 2."""
    k = 0
    while 4.0**k <= 1.5 * math.sqrt(d):
        k += 1
    return k


@dataclass(frozen=True)
class WitnessTable:
    """Per-term values of the four series built from sum_k 4^{alpha k} F_{4^{-k}}."""

    k: np.ndarray
    original: np.ndarray
    rotated: np.ndarray
    l2: np.ndarray
    l1: np.ndarray
    alpha: float

    SERIES = ("original", "rotated", "l2", "l1")

    def log4_ratios(self, series: str) -> np.ndarray:
        t = getattr(self, series)
        return np.log(t[1:] / t[:-1]) / math.log(4.0)

    def partial_sums(self, series: str) -> np.ndarray:
        return np.cumsum(getattr(self, series))


def rotation_witness(q: RotationSpec, p: SpaceParams, K_terms: int = 12) -> WitnessTable:
    """Terms k = K, ..., K + K_terms - 1 of the series for ||F||_X^2, ||F o Q||_X^2, ||F||_2^2 and ||F||_1."""
    bad = p.violations("anisotropic", "is_complete", "embeds_Hs")
    if bad:
        raise PreconditionError("precondition violated: " + "; ".join(bad))
    if q.d != p.d:
        raise ValueError(f"rotation is {q.d}-dimensional but d = {p.d}")
    if not q.overlap < 1:
        raise PreconditionError(f"precondition violated: |Q e_1 . e_1| < 1 (got {q.overlap:.15g})")
    if K_terms < 2:
        raise ValueError("need at least two terms")
    alpha = (p.d + p.delta + 1 - 2 * p.r) / 2
    w = XWeight(p)
    wq = RotatedWeight(w, q.Q)
    K = start_index(p.d)
    ks = np.arange(K, K + K_terms)
    rows = []
    for k in ks:
        F = feps_family(4.0 ** (-k), p.d, p.delta, q.signs)
        c = 4.0 ** (alpha * k)
        rows.append((c * c * weighted_norm(F, w) ** 2, c * c * weighted_norm(F, wq) ** 2,
                     c * c * F.l2_norm() ** 2, c * F.l1_norm()))
    a = np.array(rows)
    return WitnessTable(ks, a[:, 0], a[:, 1], a[:, 2], a[:, 3], alpha)


# ---------------------------------------------------------------------------
# the trilinear functional


@dataclass(frozen=True)
class Estimate:
    value: float
    error: float
    hits: int = 0
    empty: bool = False


def _mu(r, delta, xi):
    rho = _norm(xi)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (np.abs(xi[..., 0]) + rho**delta) / rho**r


def kernel(xi, eta, r: float, delta: float) -> np.ndarray:
    """mu(xi + eta) / (mu(xi) mu(eta)); set to 0 on the null set where xi or eta vanishes."""
    xi = np.asarray(xi, float)
    eta = np.asarray(eta, float)
    top = _mu(r, delta, xi + eta)
    top = np.where(_norm(xi + eta) == 0, 0.0, top)
    bottom = _mu(r, delta, xi) * _mu(r, delta, eta)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = top / bottom
    return np.where((bottom > 0) & np.isfinite(out), out, 0.0)


def _check_nonnegative(*fs):
    for f in fs:
        if isinstance(f, RectangleSet):
            v = f.values
            if np.any(np.abs(v.imag) > 0) or np.any(v.real < 0):
                raise ValueError("trilinear functional needs nonnegative real values")
        elif isinstance(f, BallIndicator):
            if f.value < 0:
                raise ValueError("trilinear functional needs nonnegative real values")


def _real(f, x):
    return np.real(f(x))


def trilinear_I(F, G, H, r: float, delta: float, method: str = "tensor", *, samples: int = 200_000,
                seed: Optional[int] = None, order: int = 8, rtol: float = 1e-6, max_order: int = 24,
                region: Optional[str] = None) -> Estimate:
    """Estimate I(F, G, H), optionally restricted to ``region`` in {"E0", "E1"}.

    ``method="monte_carlo"`` samples xi from supp F and eta from supp G and reports
    one standard error. ``method="tensor"`` integrates box triples exactly up to a
    product Gauss rule: per axis, (xi_i, xi_i + eta_i) ranges over a convex polygon,
    which is cut along the kink lines and fan-triangulated. The Gauss order grows
    from ``order`` until two successive orders agree to ``rtol`` or ``max_order``
    is reached; the reported error is that last difference.
    """
    _check_nonnegative(F, G, H)
    if region is not None and region not in REGIONS:
        raise ValueError(f"unknown region {region!r}")
    if method == "monte_carlo":
        if seed is None:
            raise ValueError("monte_carlo needs a seed")
        return _trilinear_mc(F, G, H, r, delta, samples, np.random.default_rng(seed), region)
    if method == "tensor":
        if region is not None:
            raise ValueError("tensor quadrature covers the full domain only; use monte_carlo for regions")
        for f in (F, G, H):
            if not isinstance(f, RectangleSet):
                raise ValueError("tensor quadrature needs rectangle data")
        for f in (F, G):
            if f.max_radius() > 1:
                raise ValueError("tensor quadrature needs F and G supported in the closed unit ball")
        prev = _trilinear_tensor(F, G, H, r, delta, order)
        p = order
        while True:
            p = p + max(4, p // 2)
            cur = _trilinear_tensor(F, G, H, r, delta, p)
            err = abs(cur - prev)
            if err <= rtol * abs(cur) or p >= max_order:
                return Estimate(cur, err)
            prev = cur
    raise ValueError(f"unknown method {method!r}")


def _trilinear_mc(F, G, H, r, delta, samples, rng, region) -> Estimate:
    if samples < 2:
        raise ValueError("need at least two samples")
    xi, vf = F.sample(rng, samples)
    eta, vg = G.sample(rng, samples)
    mask = REGIONS[region](xi, eta) if region else in_unit_balls(xi, eta)
    vals = np.where(mask, kernel(xi, eta, r, delta) * _real(F, xi) * _real(G, eta) * _real(H, xi + eta), 0.0)
    scale = vf * vg
    return Estimate(scale * vals.mean(), scale * vals.std(ddof=1) / math.sqrt(samples), int(mask.sum()))


def _axis_polygon(f_lo, f_hi, g_lo, g_hi, h_lo, h_hi):
    """{(x, z): f_lo <= x <= f_hi, g_lo <= z - x <= g_hi, h_lo <= z <= h_hi} as a vertex list."""
    big = 4 * max(abs(v) for v in (f_lo, f_hi, g_lo, g_hi, h_lo, h_hi)) + 1
    poly = np.array([[f_lo, -big], [f_hi, -big], [f_hi, big], [f_lo, big]])
    for a, b, c in ((0, 1, h_lo), (0, -1, -h_hi), (-1, 1, g_lo), (1, -1, -g_hi)):
        poly = clip_halfplane(poly, a, b, c)
        if len(poly) < 3:
            return None
    return poly


KINKS = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (-1.0, 1.0, 0.0))


def _trilinear_tensor(F, G, H, r, delta, order) -> float:
    d = F.d
    total = 0.0
    for fl, fh, fv in zip(F.lo, F.hi, F.values.real):
        for gl, gh, gv in zip(G.lo, G.hi, G.values.real):
            for hl, hh, hv in zip(H.lo, H.hi, H.values.real):
                c = fv * gv * hv
                if c == 0:
                    continue
                rules = []
                for ax in range(d):
                    poly = _axis_polygon(fl[ax], fh[ax], gl[ax], gh[ax], hl[ax], hh[ax])
                    if poly is None:
                        break
                    pieces = split_polygon(poly, KINKS)
                    if not pieces:
                        break
                    nodes, weights = zip(*(polygon_rule(pc, order) for pc in pieces))
                    rules.append((np.concatenate(nodes), np.concatenate(weights)))
                else:
                    total += c * _tensor_sum(rules, r, delta)
    return float(total)


def _tensor_sum(rules, r, delta, chunk: int = 2_000_000) -> float:
    """Sum of kernel * product weights over the tensor grid of per-axis (x, z) rules."""
    d = len(rules)
    sizes = [len(w) for _, w in rules]
    # iterate over the first axis in blocks so the tensor grid never exceeds ``chunk`` points
    rest = int(np.prod(sizes[1:])) if d > 1 else 1
    idx_rest = np.indices(sizes[1:]).reshape(d - 1, -1) if d > 1 else np.zeros((0, 1), int)
    step = max(1, chunk // rest)
    out = 0.0
    n0, w0 = rules[0]
    for s in range(0, sizes[0], step):
        blk = slice(s, min(s + step, sizes[0]))
        b = n0[blk].shape[0]
        xi = np.empty((b, rest, d))
        zeta = np.empty((b, rest, d))
        wt = np.broadcast_to(w0[blk][:, None], (b, rest)).copy()
        xi[..., 0] = n0[blk, 0][:, None]
        zeta[..., 0] = n0[blk, 1][:, None]
        for ax in range(1, d):
            nodes, w = rules[ax]
            sel = idx_rest[ax - 1]
            xi[..., ax] = nodes[sel, 0][None, :]
            zeta[..., ax] = nodes[sel, 1][None, :]
            wt *= w[sel][None, :]
        out += float(np.sum(wt * kernel(xi, zeta - xi, r, delta)))
    return out


# ---------------------------------------------------------------------------
# dyadic pieces


def _shell_norm(f, lo, hi, rng) -> float:
    return float(f.shell_l2_norm(lo, hi, rng=rng))


def large_d_exponent(m: int, n: int, d: int, r: float, delta: float) -> float:
    """log2 of the kernel-and-volume factor 2^{2m(delta - r) - n(1 - r + d/2)}."""
    return 2 * m * (delta - r) - n * (1 - r + d / 2)


def tiling_exponent(m: int, n: int, d: int, r: float, delta: float) -> float:
    """log2 of the anisotropic tiling factor 2^{n(r - d/2 + 1/2) + m(delta/2 - 2r)}."""
    return n * (r - d / 2 + 0.5) + m * (delta / 2 - 2 * r)


@dataclass(frozen=True)
class DyadicEstimate:
    value: float
    error: float
    bound: float
    tiling_bound: float
    hits: int
    empty: bool


def _sum_shell_mc(F, G, H, r, delta, m, z_lo, z_hi, samples, rng):
    """MC of I over E1 with xi in the m-th shell and |xi + eta| in (z_lo, z_hi]."""
    d = F.d
    a_lo, a_hi = 2.0 ** (-m - 1), 2.0**-m
    proposals = min(MC_OVERSAMPLING * samples, MC_MAX_PROPOSALS)
    xi = sample_shell(rng, d, a_lo, a_hi, proposals)
    zeta = sample_shell(rng, d, z_lo, z_hi, proposals)
    eta = zeta - xi
    mask = in_E1(xi, eta)
    hits = int(mask.sum())
    if hits == 0:
        return 0.0, 0.0, 0, True
    vals = np.zeros(proposals)
    vals[mask] = (kernel(xi[mask], eta[mask], r, delta) * _real(F, xi[mask]) * _real(G, eta[mask])
                  * _real(H, zeta[mask]))
    scale = shell_volume(d, a_lo, a_hi) * shell_volume(d, z_lo, z_hi)
    return scale * vals.mean(), scale * vals.std(ddof=1) / math.sqrt(proposals), hits, False


def dyadic_I_mn(region: DyadicRegion, F, G, H, r: float, delta: float, *, samples: int = 100_000,
                seed: int) -> DyadicEstimate:
    """Monte Carlo I restricted to E_{m,n}, with the two dyadic upper bounds.

    Proposals are drawn uniformly from the xi shell times the xi + eta shell
    (``MC_OVERSAMPLING`` per requested sample) and rejected outside E1.
    """
    _check_nonnegative(F, G, H)
    rng = np.random.default_rng(seed)
    m, n = region.m, region.n
    z_lo, z_hi = region.sum_shell
    value, err, hits, empty = _sum_shell_mc(F, G, H, r, delta, m, z_lo, z_hi, samples, rng)
    d = F.d
    norms = (_shell_norm(F, 2.0 ** (-m - 2), 2.0 ** (-m + 1), rng) * _shell_norm(G, 2.0 ** (-m - 2), 2.0 ** (-m + 1), rng)
             * _shell_norm(H, 2.0 ** (-n - 1), 2.0 ** (-n + 2), rng))
    return DyadicEstimate(value, err, 2.0 ** large_d_exponent(m, n, d, r, delta) * norms,
                          2.0 ** tiling_exponent(m, n, d, r, delta) * norms, hits, empty)


def dyadic_tail(m: int, n_max: int, F, G, H, r: float, delta: float, *, samples: int = 100_000,
                seed: int) -> Estimate:
    """I over E1 with xi in the m-th shell and |xi + eta| <= 2^{-n_max + 1}, i.e. all n > n_max."""
    rng = np.random.default_rng(seed)
    v, e, hits, empty = _sum_shell_mc(F, G, H, r, delta, m, 0.0, 2.0 ** (-n_max + 1), samples, rng)
    return Estimate(v, e, hits, empty)


def shell_I1(m: int, F, G, H, r: float, delta: float, *, samples: int = 100_000, seed: int) -> Estimate:
    """I over E1 with 2^{-m-1} < |xi| <= 2^{-m}; eta is drawn from the shell |xi|/2 < |eta| < 2|xi| covers."""
    _check_nonnegative(F, G, H)
    rng = np.random.default_rng(seed)
    d = F.d
    a_lo, a_hi = 2.0 ** (-m - 1), 2.0**-m
    b_lo, b_hi = a_lo / 2, min(2 * a_hi, 1.0)
    xi = sample_shell(rng, d, a_lo, a_hi, samples)
    eta = sample_shell(rng, d, b_lo, b_hi, samples)
    mask = in_E1(xi, eta)
    vals = np.where(mask, kernel(xi, eta, r, delta) * _real(F, xi) * _real(G, eta) * _real(H, xi + eta), 0.0)
    scale = shell_volume(d, a_lo, a_hi) * shell_volume(d, b_lo, b_hi)
    return Estimate(scale * vals.mean(), scale * vals.std(ddof=1) / math.sqrt(samples), int(mask.sum()))


# ---------------------------------------------------------------------------
# the d = 2, delta > 2 witness


def algebra_witness_sets(m: int, delta: float):
    """Cubes Q, Q' (reflection of Q in xi_2) and P = Q + Q' as rectangle sets."""
    a = 2.0 ** (-m * delta)
    h = 2.0 ** (-m * delta - 2)
    Q = RectangleSet([[a - h, 2.0**-m - h]], [[a + h, 2.0**-m + h]], [1.0])
    Qp = RectangleSet([[a - h, -(2.0**-m) - h]], [[a + h, -(2.0**-m) + h]], [1.0])
    P = RectangleSet([[2 * a - 2 * h, -2 * h]], [[2 * a + 2 * h, 2 * h]], [1.0])
    return Q, Qp, P


def algebra_witness_ratio(m: int, r: float, delta: float, order: int = 8) -> float:
    """I(chi_Q, chi_Q', chi_P) / (||chi_Q|| ||chi_Q'|| ||chi_P||) in d = 2; grows like 2^{m r (delta - 2)}."""
    if not delta > 2:
        raise PreconditionError(f"precondition violated: delta > 2 (delta={delta}); the witness needs d = 2, delta > 2")
    if not r > 0:
        raise PreconditionError(f"precondition violated: r > 0 (r={r})")
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    Q, Qp, P = algebra_witness_sets(m, delta)
    est = trilinear_I(Q, Qp, P, r, delta, "tensor", order=order)
    return est.value / (Q.l2_norm() * Qp.l2_norm() * P.l2_norm())

