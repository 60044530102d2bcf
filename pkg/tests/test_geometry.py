"""Christoffel symbols and covariant derivatives against closed-form oracles.

The oracle table here is written down independently (nested-sine sphere
symbols and the warped radial families), never derived from the code under
test.
"""

import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from oracles import Poly as _Poly, oracle_christoffel

from radwarp.errors import DomainError, ProximityError
from radwarp.funcspace import RadialFunction
from radwarp.geometry import (
    asymptotic_leading_ratio,
    christoffel_at,
    covariant_bundle,
    covariant_derivatives,
    norm_profiles,
    pointwise_norm,
    radial_identity_gap,
)
from radwarp.manifold import ManifoldSpec, WarpSpec, default_point, metric_at


ALL_MANIFOLD_WARPS = [
    WarpSpec.euclidean(),
    WarpSpec.hyperbolic(),
    WarpSpec.spherical(),
    WarpSpec.tanh_cap(),
    # odd-series start of sin, positive on (0, 2.4)
    WarpSpec.custom((1.0, -1.0 / 6.0, 1.0 / 120.0), radius=2.4),
]


class TestChristoffel:
    def test_euclidean_mixed_symbol(self):
        m = ManifoldSpec(WarpSpec.euclidean(), 2)
        gamma = christoffel_at(metric_at(m, (2.0, 0.8), order=2))
        assert float(gamma.entry(2, 1, 2).value) == pytest.approx(0.5, rel=1e-14)

    def test_hyperbolic_radial_symbol_vs_finite_difference(self):
        m = ManifoldSpec(WarpSpec.hyperbolic(), 2)
        gamma = christoffel_at(metric_at(m, (1.0, 1.3), order=2))
        val = float(gamma.entry(1, 2, 2).value)
        assert val == pytest.approx(-math.sinh(1.0) * math.cosh(1.0), rel=1e-13)
        # independent oracle: -1/2 d/dr of g_22 by central differences
        h = 1e-6
        g22 = lambda r: math.sinh(r) ** 2
        assert val == pytest.approx(-(g22(1 + h) - g22(1 - h)) / (4 * h), rel=1e-8)

    def test_zero_family_is_exactly_absent(self):
        m = ManifoldSpec(WarpSpec.hyperbolic(), 4)
        gamma = christoffel_at(metric_at(m, (1.0, 0.9, 1.1, 0.7), order=2))
        n = 4
        for k in range(1, n + 1):
            assert gamma.entry(k, 1, 1) is None  # Gamma^k_11 = 0
        for i in range(2, n + 1):
            assert gamma.entry(1, i, 1) is None  # Gamma^1_i1 = 0
            assert gamma.entry(1, 1, i) is None
        assert gamma.entry(1, 1, 1) is None

    @pytest.mark.parametrize("w", ALL_MANIFOLD_WARPS, ids=lambda w: w.kind)
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_full_table_against_oracle(self, w, n):
        point = (0.9, 1.1, 0.7, 2.0, 0.6)[:n]
        m = ManifoldSpec(w, n)
        gamma = christoffel_at(metric_at(m, point, order=2))
        oracle = oracle_christoffel(w, n, point)
        for k, i, j in product(range(1, n + 1), repeat=3):
            expected = oracle.get((k, i, j), 0.0)
            entry = gamma.entry(k, i, j)
            got = float(entry.value) if entry is not None else 0.0
            assert got == pytest.approx(expected, rel=1e-12, abs=1e-13), (k, i, j)

    def test_torsion_free_symmetry(self):
        m = ManifoldSpec(WarpSpec.spherical(), 4)
        gamma = christoffel_at(metric_at(m, (1.2, 0.8, 1.9, 0.3), order=3))
        for k, i, j in product(range(1, 5), repeat=3):
            a, b = gamma.entry(k, i, j), gamma.entry(k, j, i)
            if a is None:
                assert b is None
            else:
                np.testing.assert_array_equal(a.coeffs, b.coeffs)


class TestCovariantDerivatives:
    def test_rank1_radial_gradient(self):
        m = ManifoldSpec(WarpSpec.hyperbolic(), 3)
        r = 1.4
        tensors = covariant_derivatives(_Poly(0.0, 0.0, 1.0), m, default_point(m, r), 1)
        grad = tensors[1]
        assert float(grad.component((1,)).value) == pytest.approx(2 * r, rel=1e-14)
        assert float(grad.component((2,)).value) == 0.0
        assert float(grad.component((3,)).value) == 0.0

    def test_rank2_block_structure(self):
        # second tensor: v'' on the radial slot, phi phi' gtilde v' on the
        # angular diagonal, zero elsewhere
        m = ManifoldSpec(WarpSpec.hyperbolic(), 3)
        r, t2 = 0.8, 1.1
        v = RadialFunction.gaussian(1.0)
        _, tensors = covariant_bundle(v, m, r, 2, angles=(t2, 0.4))
        h = tensors[2]
        jv = v.eval_jet(r, 2)
        d1, d2 = float(jv.derivative(1)), float(jv.derivative(2))
        phi, dphi = math.sinh(r), math.cosh(r)
        assert float(h.component((1, 1)).value) == pytest.approx(d2, rel=1e-13)
        assert float(h.component((2, 2)).value) == pytest.approx(phi * dphi * d1, rel=1e-13)
        g33 = math.sin(t2) ** 2
        assert float(h.component((3, 3)).value) == pytest.approx(phi * dphi * g33 * d1, rel=1e-13)
        for i, j in ((1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)):
            assert abs(float(h.component((i, j)).value)) < 1e-14

    @pytest.mark.parametrize("w", ALL_MANIFOLD_WARPS, ids=lambda w: w.kind)
    def test_pure_radial_component_is_kth_derivative(self, w):
        m = ManifoldSpec(w, 4)
        v = RadialFunction.gaussian(0.7)
        for k in (1, 2, 3, 4):
            gap = radial_identity_gap(v, m, 0.9, k)
            dk = abs(v.eval_jet(0.9, k).derivative(k))
            assert float(gap) <= 1e-10 * max(1.0, dk)

    def test_identity_gap_examples(self):
        m3 = ManifoldSpec(WarpSpec.hyperbolic(), 3)
        assert float(radial_identity_gap(RadialFunction.gaussian(1.0), m3, 1.0, 3)) <= 1e-10
        m4 = ManifoldSpec(WarpSpec.euclidean(), 4)
        poly = RadialFunction.polynomial_bump((1.0, 0.5, -0.25), support=4.0)
        assert float(radial_identity_gap(poly, m4, 2.0, 4)) <= 1e-10
        # base case: rank 1 is the plain radial partial
        assert float(radial_identity_gap(RadialFunction.linear(), m3, 0.5, 1)) == 0.0

    def test_rank_cap_and_proximity(self):
        m = ManifoldSpec(WarpSpec.euclidean(), 3)
        v = RadialFunction.gaussian()
        with pytest.raises(DomainError):
            covariant_bundle(v, m, 1.0, 5)
        with pytest.raises(ProximityError):
            covariant_bundle(v, m, 1e-8, 2)

    def test_each_rank_consumes_one_jet_order(self):
        m = ManifoldSpec(WarpSpec.hyperbolic(), 3)
        k = 4
        _, tensors = covariant_bundle(RadialFunction.gaussian(), m, 0.8, k)
        for rank, tensor in enumerate(tensors):
            assert tensor.rank == rank
            sample = tensor.components.flat[0]
            assert sample.order == k - rank

    def test_singular_metric_rejected(self):
        from radwarp.errors import SingularMetricError
        from radwarp.jets import BasePoint, jet_constant
        from radwarp.manifold import DiagonalMetric

        base = BasePoint((1.0, 1.0))
        zero = jet_constant(2, 2, 0.0, base)
        one = jet_constant(2, 2, 1.0, base)
        degenerate = DiagonalMetric(2, 2, (one, zero), (one, one), base)
        with pytest.raises(SingularMetricError):
            christoffel_at(degenerate)


class TestPointwiseNorm:
    def test_rank1_is_abs_derivative(self):
        m = ManifoldSpec(WarpSpec.spherical(), 4)
        v = RadialFunction.power_decay(1.0)
        r = 1.1
        metric, tensors = covariant_bundle(v, m, r, 1)
        got = float(pointwise_norm(tensors[1], metric))
        assert got == pytest.approx(abs(float(v.eval_jet(r, 1).derivative(1))), rel=1e-13)

    def test_rank0_is_abs_value(self):
        m = ManifoldSpec(WarpSpec.euclidean(), 2)
        v = RadialFunction.gaussian()
        metric, tensors = covariant_bundle(v, m, 0.7, 0)
        assert float(pointwise_norm(tensors[0], metric)) == pytest.approx(
            float(v.values(0.7)), rel=1e-14
        )

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_euclidean_hessian_of_half_square(self, n):
        # u = |x|^2 / 2 has Cartesian Hessian = identity; its Frobenius norm
        # is the oracle for the polar-coordinate computation
        m = ManifoldSpec(WarpSpec.euclidean(), n)
        v = _Poly(0.0, 0.0, 0.5)
        metric, tensors = covariant_bundle(v, m, 1.7, 2)
        oracle = float(np.linalg.norm(np.eye(n)))
        assert float(pointwise_norm(tensors[2], metric)) == pytest.approx(oracle, rel=1e-12)

    def test_angle_independence(self):
        m = ManifoldSpec(WarpSpec.hyperbolic(), 4)
        v = RadialFunction.gaussian(1.0)
        r = np.array([0.4, 1.0, 2.3])
        angle_sets = [(math.pi / 2, math.pi / 2, math.pi / 2),
                      (0.7, 1.9, 0.3),
                      (2.1, 0.5, 2.8)]
        profiles = [norm_profiles(v, m, r, 3, angles=a) for a in angle_sets]
        for other in profiles[1:]:
            np.testing.assert_allclose(other, profiles[0], rtol=1e-8)

    def test_gradient_inequality_margins(self):
        r = np.geomspace(0.05, 3.0, 64)
        for w in ALL_MANIFOLD_WARPS:
            hi = min(3.0, w.radius * 0.95)
            rr = r[r < hi]
            m = ManifoldSpec(w, 3)
            for v in (RadialFunction.gaussian(1.0), RadialFunction.log_profile(5.0)):
                profiles = norm_profiles(v, m, rr, 3)
                for j in range(4):
                    target = np.abs(v.eval_jet(rr, j).derivative(j))
                    assert np.all(profiles[j] - target >= -1e-10)

    def test_batch_matches_pointwise(self):
        m = ManifoldSpec(WarpSpec.tanh_cap(), 3)
        v = RadialFunction.gaussian(0.5)
        rr = np.array([0.3, 0.9, 1.8])
        batch = norm_profiles(v, m, rr, 2)
        for i, r in enumerate(rr):
            single = norm_profiles(v, m, float(r), 2)
            np.testing.assert_allclose(batch[:, i], single, rtol=1e-13)

    def test_value_array_shape_and_content(self):
        m = ManifoldSpec(WarpSpec.hyperbolic(), 3)
        rr = np.array([0.5, 1.5])
        _, tensors = covariant_bundle(RadialFunction.gaussian(), m, rr, 2)
        arr = tensors[2].value_array()
        assert arr.shape == (3, 3, 2)
        np.testing.assert_array_equal(
            arr[0, 0], np.asarray(tensors[2].component((1, 1)).value)
        )


class TestAsymptoticLeading:
    def test_rank2_is_exactly_one(self):
        for w in ALL_MANIFOLD_WARPS:
            m = ManifoldSpec(w, 3)
            for r in (1e-2, 0.5, 1.0):
                assert asymptotic_leading_ratio(m, 2, r) == pytest.approx(1.0, abs=1e-12)

    def test_rank3_hyperbolic(self):
        m = ManifoldSpec(WarpSpec.hyperbolic(), 3)
        assert asymptotic_leading_ratio(m, 3, 1e-3) == pytest.approx(-1.0, rel=1e-2)

    def test_rank4_euclidean(self):
        m = ManifoldSpec(WarpSpec.euclidean(), 4)
        assert asymptotic_leading_ratio(m, 4, 1e-3) == pytest.approx(2.0, rel=1e-2)

    def test_euclidean_rank3_exact(self):
        # flat case: the expansion terminates, ratio is exactly -1 at any r
        m = ManifoldSpec(WarpSpec.euclidean(), 3)
        assert asymptotic_leading_ratio(m, 3, 0.75) == pytest.approx(-1.0, abs=1e-13)

    def test_rank_guard(self):
        m = ManifoldSpec(WarpSpec.euclidean(), 3)
        with pytest.raises(DomainError):
            asymptotic_leading_ratio(m, 1, 0.1)


@settings(max_examples=25, deadline=None)
@given(
    c3=st.floats(min_value=-0.1, max_value=0.3),
    c5=st.floats(min_value=0.0, max_value=0.05),
    a=st.floats(min_value=0.3, max_value=2.0),
    r=st.floats(min_value=0.05, max_value=1.4),
    n=st.integers(2, 4),
)
def test_identity_and_inequality_fuzz_over_custom_warps(c3, c5, a, r, n):
    # 1 + c3 r^2 + c5 r^4 stays positive on (0, 1.5) for these ranges
    w = WarpSpec.custom((1.0, c3, c5), radius=1.5)
    m = ManifoldSpec(w, n)
    v = RadialFunction.gaussian(a)
    metric, tensors = covariant_bundle(v, m, r, 3)
    vjet = v.eval_jet(r, 3)
    for k in (1, 2, 3):
        lhs = float(tensors[k].component((1,) * k).value)
        rhs = float(vjet.derivative(k))
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))
        assert float(pointwise_norm(tensors[k], metric)) >= abs(rhs) - 1e-10
