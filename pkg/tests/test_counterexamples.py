import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aniso.counterexamples import (
    DyadicRegion,
    RotatedWeight,
    RotationSpec,
    algebra_witness_ratio,
    algebra_witness_sets,
    dyadic_I_mn,
    dyadic_tail,
    feps_family,
    feps_norms,
    in_E0,
    in_E1,
    in_unit_balls,
    kernel,
    large_d_exponent,
    rotation_witness,
    shell_I1,
    start_index,
    tiling_exponent,
    trilinear_I,
)
from aniso.errors import PreconditionError
from aniso.multipliers import SpaceParams
from aniso.norms import XWeight, weighted_norm
from aniso.rectangles import BallIndicator, RectangleSet

P3 = SpaceParams(2.0, 1.0, 2.0, 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_E0_E1_partition_unit_balls(seed, d):
    rng = np.random.default_rng(seed)
    xi = rng.uniform(-1, 1, (5000, d))
    eta = rng.uniform(-1, 1, (5000, d))
    e0, e1, ball = in_E0(xi, eta), in_E1(xi, eta), in_unit_balls(xi, eta)
    assert not np.any(e0 & e1)
    assert np.array_equal(e0 | e1, ball)
    a, b = np.linalg.norm(xi, axis=1), np.linalg.norm(eta, axis=1)
    assert np.all((a[e1] > b[e1] / 2) & (a[e1] < 2 * b[e1]))


def test_dyadic_region_membership():
    reg = DyadicRegion(1, 2)
    assert reg.xi_shell == (0.25, 0.5) and reg.sum_shell == (0.5, 1.0)
    xi = np.array([[0.3, 0.0], [0.3, 0.0]])
    eta = np.array([[0.4, 0.0], [0.0, 0.3]])
    assert reg.contains(xi, eta).tolist() == [True, False]
    with pytest.raises(PreconditionError):
        DyadicRegion(3, 2)
    with pytest.raises(ValueError):
        DyadicRegion(-1, 2)


def test_rotation_spec():
    with pytest.raises(ValueError):
        RotationSpec(np.array([[1.0, 0.1], [0.0, 1.0]]))
    q = RotationSpec.plane_rotation(3, 0, 1, math.pi / 2)
    assert q.overlap == 0.0
    assert q.signs.tolist() == [1.0, 1.0, 1.0]
    w = RotatedWeight(XWeight(P3), q.Q)
    xi = np.array([0.0, 0.3, 0.1])
    assert np.isclose(w(xi), XWeight(P3)(xi @ q.Q))


def test_start_index():
    assert start_index(1) == 1
    assert start_index(3) == 1
    # 4^1 = 4 > 1.5 sqrt(7) = 3.97; 1.5 sqrt(8) = 4.24 needs K = 2
    assert start_index(7) == 1 and start_index(8) == 2


def test_feps_family_shape():
    F = feps_family(0.25, 3, 2.0)
    assert F.is_hermitian() and F.is_disjoint()
    assert np.isclose(F.l1_norm(), 2 * 0.25**2 * 0.25**2)
    with pytest.raises(ValueError):
        feps_family(0.5, 3, 2.0)
    flipped = feps_family(0.25, 3, 2.0, signs=[1, -1, 1])
    assert flipped.hi[0, 1] < 0


def test_feps_norm_scaling_short_range():
    eps = 2.0 ** -np.arange(4, 8)
    x = [feps_norms(e, P3).x_norm for e in eps]
    slope = np.polyfit(np.log(eps), np.log(x), 1)[0]
    assert abs(slope - 3.0) < 0.05
    with pytest.raises(PreconditionError):
        feps_norms(0.1, SpaceParams(2.0, 1.0, 1.0, 3))


def test_rotation_witness_preconditions():
    with pytest.raises(PreconditionError, match="Q e_1"):
        rotation_witness(RotationSpec(np.eye(3)), P3)
    with pytest.raises(PreconditionError):
        rotation_witness(RotationSpec.plane_rotation(3, 0, 1, 1.0), SpaceParams(2.0, 1.5, 2.0, 3))
    with pytest.raises(ValueError):
        rotation_witness(RotationSpec.plane_rotation(2, 0, 1, 1.0), P3)


def test_rotation_witness_series():
    t = rotation_witness(RotationSpec.plane_rotation(3, 0, 1, math.pi / 2), P3, 8)
    assert t.k.tolist() == list(range(1, 9))
    assert np.allclose(t.log4_ratios("original")[2:], -2.0, atol=1e-3)
    assert np.allclose(t.log4_ratios("rotated")[2:], 0.0, atol=1e-3)
    assert np.allclose(t.log4_ratios("l2"), 0.0, atol=1e-12)
    # the rotated series diverges: partial sums grow linearly
    ps = t.partial_sums("rotated")
    assert ps[-1] > 7 * t.rotated[0] * 0.9


def test_kernel_symmetric_and_safe():
    rng = np.random.default_rng(1)
    xi, eta = rng.uniform(-1, 1, (100, 2)), rng.uniform(-1, 1, (100, 2))
    assert np.allclose(kernel(xi, eta, 0.9, 2.5), kernel(eta, xi, 0.9, 2.5))
    z = np.zeros((1, 2))
    assert kernel(z, xi[:1], 0.9, 2.5)[0] == 0.0
    assert kernel(xi[:1], -xi[:1], 0.9, 2.5)[0] == 0.0


BOXES = (RectangleSet([[0.1, 0.2]], [[0.3, 0.5]], [1.0]),
         RectangleSet([[-0.2, 0.05]], [[0.1, 0.25]], [2.0]),
         RectangleSet([[-0.2, 0.2], [0.5, 0.0]], [[0.5, 0.8], [0.8, 0.9]], [1.0, 0.5]))


def test_trilinear_tensor_agrees_with_monte_carlo():
    F, G, H = BOXES
    assert H.is_disjoint()
    t = trilinear_I(F, G, H, 0.9, 2.5, "tensor")
    mc = trilinear_I(F, G, H, 0.9, 2.5, "monte_carlo", samples=400_000, seed=3)
    assert abs(t.value - mc.value) < 4 * mc.error
    assert t.error <= 1e-3 * t.value
    swapped = trilinear_I(G, F, H, 0.9, 2.5, "tensor")
    assert abs(t.value - swapped.value) <= 2 * (t.error + swapped.error)


def test_trilinear_regions_add_up():
    F, G, H = BOXES
    full = trilinear_I(F, G, H, 0.9, 2.5, "monte_carlo", samples=100_000, seed=5)
    e0 = trilinear_I(F, G, H, 0.9, 2.5, "monte_carlo", samples=100_000, seed=5, region="E0")
    e1 = trilinear_I(F, G, H, 0.9, 2.5, "monte_carlo", samples=100_000, seed=5, region="E1")
    assert math.isclose(e0.value + e1.value, full.value, rel_tol=1e-12)


def test_trilinear_argument_checks():
    F, G, H = BOXES
    neg = RectangleSet([[0.1, 0.1]], [[0.2, 0.2]], [-1.0])
    with pytest.raises(ValueError):
        trilinear_I(neg, G, H, 0.9, 2.5)
    with pytest.raises(ValueError):
        trilinear_I(F, G, H, 0.9, 2.5, "monte_carlo")
    with pytest.raises(ValueError):
        trilinear_I(F, G, H, 0.9, 2.5, "tensor", region="E1")
    with pytest.raises(ValueError):
        trilinear_I(RectangleSet([[0.5, 0.5]], [[0.9, 0.9]], [1.0]), G, H, 0.9, 2.5)
    with pytest.raises(ValueError):
        trilinear_I(F, G, H, 0.9, 2.5, "simpson")


def test_dyadic_pieces_sum_to_shell():
    B = BallIndicator(2, 1.0)
    r, delta, m = 0.9, 2.5, 1
    pieces = [dyadic_I_mn(DyadicRegion(m, n), B, B, B, r, delta, samples=100_000, seed=n) for n in range(m, 6)]
    tail = dyadic_tail(m, 5, B, B, B, r, delta, samples=100_000, seed=99)
    shell = shell_I1(m, B, B, B, r, delta, samples=400_000, seed=7)
    total = sum(p.value for p in pieces) + tail.value
    err = math.sqrt(sum(p.error**2 for p in pieces) + tail.error**2 + shell.error**2)
    assert abs(total - shell.value) < 4 * err
    for p in pieces:
        assert p.value <= p.bound * 50


def test_dyadic_exponents():
    assert large_d_exponent(2, 3, 2, 0.9, 2.5) == pytest.approx(2 * 2 * 1.6 - 3 * 1.1)
    assert tiling_exponent(2, 3, 2, 0.9, 2.5) == pytest.approx(3 * 0.4 + 2 * (1.25 - 1.8))


def test_algebra_witness_geometry():
    Q, Qp, P = algebra_witness_sets(3, 2.5)
    assert np.allclose(Qp.lo[0], [Q.lo[0, 0], -Q.hi[0, 1]])
    # P is exactly the Minkowski sum Q + Q'
    assert np.allclose(P.lo, Q.lo + Qp.lo) and np.allclose(P.hi, Q.hi + Qp.hi)


def test_algebra_witness_preconditions_and_growth():
    with pytest.raises(PreconditionError, match="delta > 2"):
        algebra_witness_ratio(3, 0.9, 2.0)
    with pytest.raises(PreconditionError):
        algebra_witness_ratio(3, 0.0, 2.5)
    a, b = algebra_witness_ratio(4, 0.9, 2.5), algebra_witness_ratio(6, 0.9, 2.5)
    assert 0.3 < math.log2(b / a) / 2 < 0.6


def test_E1_geometry_on_random_pairs():
    rng = np.random.default_rng(21)
    xi = rng.uniform(-1, 1, (200_000, 3))
    eta = rng.uniform(-1, 1, (200_000, 3))
    e1 = in_E1(xi, eta)
    a, b = np.linalg.norm(xi, axis=1), np.linalg.norm(eta, axis=1)
    c = np.linalg.norm(xi + eta, axis=1)
    ball = in_unit_balls(xi, eta)
    assert np.array_equal(e1, ball & (b / 2 < a) & (a < 2 * b))
    assert np.all(c[e1] < 3 * b[e1])


def test_mu_subadditive_on_E0():
    from aniso.multipliers import mu_weight

    r, delta = 0.9, 2.5
    consts = []
    for seed in (1, 2):
        rng = np.random.default_rng(seed)
        xi = rng.uniform(-1, 1, (100_000, 2))
        eta = rng.uniform(-1, 1, (100_000, 2))
        sel = in_E0(xi, eta)
        xi, eta = xi[sel], eta[sel]
        ok = (np.linalg.norm(xi, axis=1) > 1e-9) & (np.linalg.norm(eta, axis=1) > 1e-9)
        xi, eta = xi[ok], eta[ok]
        ratio = mu_weight(r, delta, xi + eta) / (mu_weight(r, delta, xi) + mu_weight(r, delta, eta))
        consts.append(ratio.max())
    assert max(consts) < 5
    assert abs(consts[0] - consts[1]) < 0.2 * max(consts)


def test_E0_piece_bounded_by_inverse_mu_norm():
    from aniso.quadrature import inverse_mu_l2

    r, delta = 0.9, 2.5
    scale = inverse_mu_l2(2, r, delta)
    rng = np.random.default_rng(4)
    consts = []
    for i in range(50):
        boxes = []
        for _ in range(3):
            lo = rng.uniform(-0.6, 0.4, 2)
            boxes.append(RectangleSet([lo], [lo + rng.uniform(0.05, 0.3, 2)], [1.0]))
        F, G, H = boxes
        est = trilinear_I(F, G, H, r, delta, "monte_carlo", samples=20_000, seed=i, region="E0")
        consts.append(est.value / (scale * F.l2_norm() * G.l2_norm() * H.l2_norm()))
    assert 0 <= max(consts) < 10


def test_zero_data_gives_zero():
    F, G, H = BOXES
    zero = RectangleSet(F.lo, F.hi, [0.0])
    assert trilinear_I(zero, G, H, 0.9, 2.5, "tensor").value == 0.0


def test_dyadic_constant_stable_under_sample_doubling():
    B = BallIndicator(2, 1.0)
    # |xi + eta| < 2 on B(0,1)^2, so E_{0,0} is empty and is reported as such;
    # on E_{0,1} the sum leaves the unit ball and H vanishes, so a live cell needs n >= 2
    empty = dyadic_I_mn(DyadicRegion(0, 0), B, B, B, 0.9, 2.5, samples=10_000, seed=0)
    assert empty.empty and empty.value == 0.0
    consts = []
    for samples in (50_000, 100_000):
        est = dyadic_I_mn(DyadicRegion(1, 2), B, B, B, 0.9, 2.5, samples=samples, seed=samples)
        assert not est.empty and est.hits > 0
        consts.append(est.value / est.bound)
    assert abs(consts[0] - consts[1]) < 0.1 * consts[1]


def test_rectangle_norm_stable_under_tolerance_refinement():
    from aniso.norms import _rectangle_norm

    F = feps_family(0.125, 3, 2.0)
    w = XWeight(P3)
    a = _rectangle_norm(F, w, rtol=1e-6)
    b = _rectangle_norm(F, w, rtol=1e-8)
    assert math.isclose(a, b, rel_tol=1e-6)


def test_feps_l2_squared_equals_l1():
    n = feps_norms(0.1, P3)
    assert math.isclose(n.l2**2, n.l1, rel_tol=1e-14)


def test_algebra_ratio_increases_with_m():
    vals = [algebra_witness_ratio(m, 0.9, 2.5) for m in range(2, 6)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
