"""Family jets against closed-form derivatives; norm oracles and invariants."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import erf

from radwarp.errors import DomainError, InadmissibleParameterError
from radwarp.funcspace import (
    NormRequest,
    RadialFunction,
    default_families,
    lq_theta_norm_1d,
    sobolev_norm_1d,
    sobolev_norm_manifold,
    sobolev_seminorms_1d,
)
from radwarp.manifold import ManifoldSpec, WarpSpec, sphere_volume


class TestEvalJet:
    def test_linear(self):
        j = RadialFunction.linear().eval_jet(3.0, 2)
        assert [j.derivative(m) for m in range(3)] == [3.0, 1.0, 0.0]

    def test_gaussian_near_origin(self):
        j = RadialFunction.gaussian(1.0).eval_jet(1e-9, 2)
        np.testing.assert_allclose(
            [j.derivative(m) for m in range(3)], [1.0, 0.0, -2.0], atol=5e-9
        )

    def test_power_decay_at_one(self):
        j = RadialFunction.power_decay(1.0).eval_jet(1.0, 1)
        assert j.derivative(0) == pytest.approx(0.5, rel=1e-14)
        assert j.derivative(1) == pytest.approx(-0.5, rel=1e-14)

    @pytest.mark.parametrize("t", [0.3, 1.0, 2.7])
    def test_gaussian_derivatives_closed_form(self, t):
        a = 0.8
        v = math.exp(-a * t**2)
        oracle = [
            v,
            -2 * a * t * v,
            (4 * a**2 * t**2 - 2 * a) * v,
            (-8 * a**3 * t**3 + 12 * a**2 * t) * v,
            (16 * a**4 * t**4 - 48 * a**3 * t**2 + 12 * a**2) * v,
        ]
        j = RadialFunction.gaussian(a).eval_jet(t, 4)
        np.testing.assert_allclose(
            [j.derivative(m) for m in range(5)], oracle, rtol=1e-12, atol=1e-13
        )

    def test_log_profile_closed_form(self):
        r_ref, delta, t = 2.0, 0.1, 0.5
        f = RadialFunction.log_profile(r_ref, delta)
        j = f.eval_jet(t, 2)
        d = t**2 + delta**2
        assert j.derivative(0) == pytest.approx(math.log(r_ref) - 0.5 * math.log(d), rel=1e-13)
        assert j.derivative(1) == pytest.approx(-t / d, rel=1e-13)
        assert j.derivative(2) == pytest.approx((t**2 - delta**2) / d**2, rel=1e-12)

    def test_bump_vanishes_beyond_support(self):
        f = RadialFunction.polynomial_bump((1.0, 0.5), support=1.0)
        j = f.eval_jet(np.array([0.5, 1.0, 2.0]), 3)
        assert np.all(j.coeffs[1] == 0.0)
        assert np.all(j.coeffs[2] == 0.0)
        assert abs(j.value[0]) > 0

    def test_bump_jets_match_finite_differences(self):
        f = RadialFunction.polynomial_bump((1.0, -0.3, 0.2), support=2.0)
        h = 1e-5
        for t in (0.4, 1.1, 1.8):
            j = f.eval_jet(t, 2)
            fd1 = (f.values(t + h) - f.values(t - h)) / (2 * h)
            fd2 = (f.values(t + h) - 2 * f.values(t) + f.values(t - h)) / h**2
            assert j.derivative(1) == pytest.approx(fd1, rel=1e-6, abs=1e-8)
            assert j.derivative(2) == pytest.approx(fd2, rel=1e-4, abs=1e-5)

    def test_domain_guard(self):
        with pytest.raises(DomainError):
            RadialFunction.gaussian().eval_jet(-0.5, 2)
        with pytest.raises(DomainError):
            RadialFunction.gaussian().eval_jet(1.0, 5)


class TestEnvelopes:
    @pytest.mark.parametrize("f", default_families(10.0), ids=lambda f: f.family)
    def test_envelope_dominates_derivatives(self, f):
        env = f.decay_envelope()
        if env is None:
            return
        grid = np.geomspace(max(env.valid_from, 1.0), 40.0, 120)
        bound = env.coef * grid**env.power * np.exp(-env.rate * grid - env.quad_rate * grid**2)
        for j in range(5):
            vals = np.abs(f.derivative_values(grid, j))
            assert np.all(vals <= bound + 1e-300), f"order {j} escapes the envelope"

    def test_admissibility_flags(self):
        assert RadialFunction.gaussian().admissible_unbounded()
        assert RadialFunction.polynomial_bump().admissible_unbounded()
        assert RadialFunction.power_decay().admissible_unbounded()
        assert not RadialFunction.linear().admissible_unbounded()
        assert not RadialFunction.log_profile(5.0).admissible_unbounded()

    def test_envelope_override_accepted_when_valid(self):
        f = RadialFunction("gaussian", (("a", 1.0),),
                           envelope_override=(1e6, 6.0, 0.0, 0.5))
        env = f.decay_envelope()
        assert env.coef == 1e6 and env.quad_rate == 0.5

    def test_envelope_override_rejected_when_violated(self):
        with pytest.raises(DomainError):
            RadialFunction("linear", (), envelope_override=(0.5, 0.0, 0.0))


class TestLebesgueNorms:
    def test_linear_weighted_square(self):
        # (int_0^1 t^2 * t^2)^(1/2) = sqrt(1/5)
        val = lq_theta_norm_1d(RadialFunction.linear(), 2.0, 2.0, WarpSpec.euclidean(1.0))
        assert val == pytest.approx(math.sqrt(0.2), rel=1e-10)

    def test_plain_l1(self):
        val = lq_theta_norm_1d(RadialFunction.linear(), 1.0, 0.0, WarpSpec.euclidean(1.0))
        assert val == pytest.approx(0.5, rel=1e-10)

    def test_gaussian_against_sinh_closed_form(self):
        # int_0^inf exp(-2 t^2) sinh t dt = e^{1/8} sqrt(pi/8) erf(sqrt(2)/4)
        oracle = math.exp(0.125) * math.sqrt(math.pi / 8.0) * erf(math.sqrt(2.0) / 4.0)
        val = lq_theta_norm_1d(RadialFunction.gaussian(1.0), 2.0, 1.0, WarpSpec.hyperbolic())
        assert val == pytest.approx(math.sqrt(oracle), rel=1e-10)

    def test_divergent_norm_signals_inf(self):
        # t against sinh^3 on (0, inf) diverges
        val = lq_theta_norm_1d(RadialFunction.linear(), 2.0, 3.0, WarpSpec.hyperbolic())
        assert math.isinf(val)

    def test_small_support_bump_on_large_domain(self):
        # support 0.2 against domain radius 1: panels must descend into the
        # support; oracle is a dense trapezoid rule
        f = RadialFunction.polynomial_bump((1.0,), support=0.2)
        val = lq_theta_norm_1d(f, 1.0, 0.0, WarpSpec.euclidean(1.0))
        grid = np.linspace(1e-9, 0.2, 400_001)
        trapezoid = getattr(np, "trapezoid", np.trapz)
        oracle = trapezoid(f.values(grid), grid)
        assert val == pytest.approx(oracle, rel=1e-6)
        # and agrees exactly with the same integral on a snug domain
        snug = lq_theta_norm_1d(f, 1.0, 0.0, WarpSpec.euclidean(0.25))
        assert val == pytest.approx(snug, rel=1e-10)


class TestSobolevNorms:
    def test_linear_two_monomials(self):
        # sqrt(int t^2 t^2 + int 1 t^2) = sqrt(1/5 + 1/3)
        val = sobolev_norm_1d(RadialFunction.linear(), 1, 2.0, 3, WarpSpec.euclidean(1.0))
        assert val == pytest.approx(math.sqrt(8.0 / 15.0), rel=1e-10)

    def test_zero_function(self):
        zero = RadialFunction.polynomial_bump((0.0,), support=1.0)
        assert sobolev_norm_1d(zero, 2, 2.0, 3, WarpSpec.euclidean(1.0)) == 0.0
        m = ManifoldSpec(WarpSpec.euclidean(1.0), 3)
        assert sobolev_norm_manifold(zero, 1, 2.0, m) == 0.0

    def test_gaussian_unbounded_finite(self):
        val = sobolev_norm_1d(RadialFunction.gaussian(1.0), 2, 2.0, 3, WarpSpec.hyperbolic())
        assert math.isfinite(val) and val > 0

    @settings(max_examples=12, deadline=None)
    @given(lam=st.floats(min_value=0.5, max_value=50.0))
    def test_homogeneity(self, lam):
        w = WarpSpec.euclidean(1.0)
        base = RadialFunction.polynomial_bump((1.0, -0.3), support=0.8)
        scaled = RadialFunction.polynomial_bump((lam, -0.3 * lam), support=0.8)
        for fn in (
            lambda f: lq_theta_norm_1d(f, 2.0, 1.0, w),
            lambda f: sobolev_norm_1d(f, 2, 2.0, 3, w),
        ):
            assert fn(scaled) == pytest.approx(lam * fn(base), rel=1e-8)

    def test_homogeneity_small_scale_within_quadrature_contract(self):
        # tiny integrals carry the quadrature's absolute floor
        # tol * max(1, |I|); the norm deviation is bounded by its propagation
        lam, tol = 1e-2, 1e-10
        w = WarpSpec.euclidean(1.0)
        base = RadialFunction.polynomial_bump((1.0, -0.3), support=0.8)
        scaled = RadialFunction.polynomial_bump((lam, -0.3 * lam), support=0.8)
        a = lq_theta_norm_1d(base, 2.0, 1.0, w, tol)
        b = lq_theta_norm_1d(scaled, 2.0, 1.0, w, tol)
        integral = (lam * a) ** 2
        norm_err_bound = 0.5 * tol * max(1.0, integral) / integral * (lam * a)
        assert abs(b - lam * a) <= 2.0 * norm_err_bound

    def test_manifold_k1_structure(self):
        # rank-1 pointwise norms equal |v'|, so the manifold norm is exactly
        # omega^(1/p) (I0^(1/p) + I1^(1/p)) with the same 1-D integrals
        m = ManifoldSpec(WarpSpec.hyperbolic(2.0), 3)
        f = RadialFunction.gaussian(1.0)
        p = 2.0
        parts = sobolev_seminorms_1d(f, 1, p, 3, m.warp)
        oracle = sum((sphere_volume(3) * part) ** (1 / p) for part in parts)
        val = sobolev_norm_manifold(f, 1, p, m)
        assert val == pytest.approx(oracle, rel=1e-9)

    def test_linear_counterexample_manifold_norm_infinite(self):
        # v(t) = t on a capped profile: third derivative tensor blows up
        # near the origin fast enough that the manifold norm diverges
        m = ManifoldSpec(WarpSpec.tanh_cap(2.0), 2)
        val = sobolev_norm_manifold(RadialFunction.linear(), 3, 2.0, m)
        assert math.isinf(val)
        # while the interval norm stays finite
        assert math.isfinite(sobolev_norm_1d(RadialFunction.linear(), 3, 2.0, 2, m.warp))

    @pytest.mark.parametrize("wname,w", [
        ("euclidean", WarpSpec.euclidean(1.0)),
        ("tanh", WarpSpec.tanh_cap(2.0)),
    ])
    def test_interval_norm_dominated_by_manifold(self, wname, w):
        m = ManifoldSpec(w, 3)
        omega = sphere_volume(3)
        for f in (RadialFunction.gaussian(1.0), RadialFunction.power_decay(1.5)):
            for k, p in ((1, 2.0), (2, 2.0), (3, 1.0), (4, 2.0)):
                parts = sobolev_seminorms_1d(f, k, p, 3, w)
                manifold_norm = sobolev_norm_manifold(f, k, p, m)
                interval_sum = sum((omega * s) ** (1 / p) for s in parts)
                assert interval_sum <= manifold_norm + 1e-8

    def test_euclidean_weight_equivalence_bracket(self):
        # with phi bounded above/below near R, the phi^(N-1)-weighted norm
        # and the t^(N-1)-weighted norm differ by a fixed bracket
        w = WarpSpec.tanh_cap(2.0)
        n, k, p = 3, 2, 2.0
        grid = np.linspace(1e-4, 2.0 - 1e-9, 2001)
        ratio = np.tanh(grid) / grid
        lo, hi = ratio.min() ** ((n - 1) / p), ratio.max() ** ((n - 1) / p)
        for f in default_families(2.0):
            a = sobolev_norm_1d(f, k, p, n, w)
            b = sobolev_norm_1d(f, k, p, n, WarpSpec.euclidean(2.0))
            assert lo - 1e-9 <= a / b <= hi + 1e-9


class TestNormRequest:
    def test_critical_exponent_example(self):
        req = NormRequest(k=1, p=2.0, theta=1.0, q=5.0)
        assert req.critical_q_manifold(4) == pytest.approx(5.0)

    def test_inadmissible_when_n_le_kp(self):
        req = NormRequest(k=2, p=2.0)
        with pytest.raises(InadmissibleParameterError):
            req.critical_q_manifold(4)

    def test_interval_variant(self):
        req = NormRequest(k=1, p=2.0, theta=3.0)
        assert req.critical_q_interval(4) == pytest.approx(4.0)

    def test_validation(self):
        with pytest.raises(InadmissibleParameterError):
            NormRequest(p=0.5)
        with pytest.raises(InadmissibleParameterError):
            NormRequest(theta=-1.0)
