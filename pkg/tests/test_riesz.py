import math

import numpy as np
import pytest

from nonlocal_supersol.riesz import (
    QuadratureConfig,
    RadialFunction,
    TailMetadataInvalid,
    angular_kernel,
    asymptotic_probe,
    finiteness_check_c1,
    riesz_constant,
    riesz_convolve,
    sphere_surface,
    _angular_quad,
)

from oracles import ndim_riesz_oracle, radial_quad_oracle


class TestRieszConstant:
    def test_newtonian_3d(self):
        assert riesz_constant(3, 2.0) == pytest.approx(1.0 / (4.0 * math.pi), rel=1e-14)

    def test_2d_order_one(self):
        assert riesz_constant(2, 1.0) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-14)

    def test_1d_half_order(self):
        assert riesz_constant(1, 0.5) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-14)

    def test_domain_errors(self):
        for bad in (0.0, 3.0, -1.0, 5.0):
            with pytest.raises(ValueError):
                riesz_constant(3, bad)


class TestAngularKernel:
    def test_newtonian_closed_form(self):
        # exact antiderivative: 2*min(r,s)/(r*s)
        assert angular_kernel(3, 2.0, 1.0, 2.0) == pytest.approx(1.0, rel=1e-12)
        assert angular_kernel(3, 1.0, 2.0, 2.0) == pytest.approx(1.0, rel=1e-12)

    def test_symmetry(self):
        for N, a in ((2, 0.7), (4, 2.3), (5, 1.0)):
            assert angular_kernel(N, 1.3, 0.4, a) == pytest.approx(
                angular_kernel(N, 0.4, 1.3, a), rel=1e-12
            )

    @pytest.mark.parametrize(
        "N,alpha,r,s",
        [
            (2, 1.0, 1.0, 3.0),
            (2, 0.5, 1.0, 1.02),
            (3, 1.5, 2.0, 1.9),
            (3, 1.0, 1.0, 1.001),
            (4, 2.5, 1.0, 0.2),
            (4, 3.5, 1.0, 1.0001),
            (5, 1.0, 1.0, 1.0001),
            (6, 0.3, 1.0, 0.97),
        ],
    )
    def test_against_adaptive_quadrature(self, N, alpha, r, s):
        closed = angular_kernel(N, r, s, alpha)
        quad = _angular_quad(N, r, s, alpha)
        assert closed == pytest.approx(quad, rel=5e-7)

    def test_coincident_radii_rejected(self):
        with pytest.raises(ValueError):
            angular_kernel(3, 1.0, 1.0, 2.0)

    def test_line_dimension_rejected(self):
        with pytest.raises(ValueError):
            angular_kernel(1, 1.0, 2.0, 0.5)


def gaussian() -> RadialFunction:
    # exp(-s^2) underflows to exact zero past s ~ 27, hence compact in floats
    return RadialFunction.from_expression("exp(-r^2)")


class TestRieszConvolve:
    def test_zero_density(self):
        zero = RadialFunction.from_expression("0")
        out = riesz_convolve(3, 2.0, zero, 1.0, 1.0)
        assert out.value == 0.0 and out.status == "Finite"

    def test_newtonian_ball_at_origin(self):
        ball = RadialFunction.from_expression("indicator(0,1)")
        out = riesz_convolve(3, 2.0, ball, 1.0, 0.0)
        assert out.status == "Finite"
        assert out.value == pytest.approx(0.5, abs=1e-9)
        assert out.error_estimate + out.tail_bound <= 1e-8 * out.value + 1e-15

    def test_newtonian_ball_profile(self):
        # closed forms for the uniform unit ball in R^3
        ball = RadialFunction.from_expression("indicator(0,1)")
        inside = riesz_convolve(3, 2.0, ball, 1.0, 0.5).value
        outside = riesz_convolve(3, 2.0, ball, 1.0, 2.0).value
        assert inside == pytest.approx((3.0 - 0.25) / 6.0, rel=1e-10)
        assert outside == pytest.approx(1.0 / 6.0, rel=1e-10)

    def test_divergence_from_tail_metadata(self):
        f = RadialFunction.from_expression("(1+r)^-2", tail=2.0)
        out = riesz_convolve(4, 2.0, f, 1.0, 1.0)
        assert out.status == "Divergent"
        assert out.value == math.inf

    def test_divergence_boundary_is_inclusive(self):
        f = RadialFunction.from_expression("(1+r)^-6", tail=6.0)
        assert riesz_convolve(4, 3.0, f, 0.5, 1.0).status == "Divergent"
        assert riesz_convolve(4, 2.0, f, 0.5, 1.0).status == "Finite"

    @pytest.mark.parametrize("r", [0.0, 0.7, 2.0, 11.0])
    def test_against_radial_quadpack(self, r):
        f = RadialFunction.from_expression("(1+r)^-3", tail=3.0)
        mine = riesz_convolve(4, 1.0, f, 1.0, r)
        ref = radial_quad_oracle(4, 1.0, lambda s: (1.0 + s) ** -3.0, 1.0, r, 60000.0)
        assert mine.value == pytest.approx(ref, rel=2e-7)

    def test_against_radial_quadpack_line(self):
        f = RadialFunction.from_expression("(1+r)^-4", tail=4.0)
        for alpha in (0.3, 0.8):
            mine = riesz_convolve(1, alpha, f, 1.0, 0.5)
            ref = radial_quad_oracle(1, alpha, lambda s: (1.0 + s) ** -4.0, 1.0, 0.5, 3000.0)
            assert mine.value == pytest.approx(ref, rel=1e-6)

    def test_ndim_oracle_gaussian(self):
        g = gaussian()
        val = riesz_convolve(3, 1.0, g, 1.0, 1.0)
        ref = ndim_riesz_oracle(3, 1.0, lambda s: math.exp(-s * s), 1.0, 12.0)
        assert val.value == pytest.approx(ref, rel=1e-6)

    def test_scaling_law(self):
        # f_lam(s) = f(lam*s)  =>  (I*f_lam)(r) = lam^-alpha (I*f)(lam*r)
        N, alpha = 3, 1.5
        base = RadialFunction.from_expression("(1+r)^-3", tail=3.0)
        for lam in (0.5, 2.0, 10.0):
            scaled = RadialFunction.power_tail(
                lambda s, lam=lam: (1.0 + lam * np.asarray(s, float)) ** -3.0,
                3.0,
                tail_constant=lam ** -3.0,
                tail_radius=max(8.0, 8.0 / lam),
            )
            for r in (0.5, 2.0):
                lhs = riesz_convolve(N, alpha, scaled, 1.0, r)
                rhs = riesz_convolve(N, alpha, base, 1.0, lam * r)
                budget = lhs.error_estimate + lhs.tail_bound + rhs.error_estimate + rhs.tail_bound
                assert lhs.value == pytest.approx(
                    lam ** -alpha * rhs.value, abs=2 * budget + 1e-12, rel=1e-6
                )

    def test_monotonicity_in_density(self):
        small = RadialFunction.from_expression("(1+r)^-4", tail=4.0)
        big = RadialFunction.from_expression("2*(1+r)^-4 + (1+r)^-5", tail=4.0)
        for r in (0.0, 1.0, 5.0):
            lo = riesz_convolve(4, 2.0, small, 1.0, r)
            hi = riesz_convolve(4, 2.0, big, 1.0, r)
            assert lo.value <= hi.value + lo.error_estimate + hi.error_estimate

    def test_annulus_lower_bound(self):
        # potentials dominate A_alpha 2^(alpha-N) r^(alpha-N) * mass(3/2<|y|<2)
        N, alpha = 3, 1.5
        f = RadialFunction.from_expression("(1+r)^-4", tail=4.0)
        mass, _ = __import__("scipy.integrate", fromlist=["quad"]).quad(
            lambda s: (1.0 + s) ** -4.0 * s ** (N - 1), 1.5, 2.0
        )
        mass *= sphere_surface(N - 1)
        C = riesz_constant(N, alpha) * 2.0 ** (alpha - N) * mass
        for r in (2.0, 5.0, 20.0):
            val = riesz_convolve(N, alpha, f, 1.0, r)
            assert val.value >= C * r ** (alpha - N)

    def test_shell_check_catches_lying_tail(self):
        # claims decay 4 but actually decays like 2.2
        liar = RadialFunction(
            evaluator=lambda s: (1.0 + np.asarray(s, float)) ** -2.2,
            tail_exponent=4.0,
            tail_constant=1.0,
            tail_radius=8.0,
        )
        with pytest.raises(TailMetadataInvalid):
            riesz_convolve(3, 1.0, liar, 2.0, 1.0)

    def test_budget_invariant(self):
        cfg = QuadratureConfig(rel_tol=1e-7)
        f = RadialFunction.from_expression("(1+r)^-3", tail=3.0)
        out = riesz_convolve(5, 2.0, f, 2.0, 3.0, cfg)
        assert out.error_estimate + out.tail_bound <= 1e-7 * abs(out.value)


class TestRadialFunctionMetadata:
    def test_tail_band_validation(self):
        with pytest.raises(TailMetadataInvalid):
            RadialFunction.power_tail(lambda s: np.exp(-np.asarray(s, float)), 2.0)

    def test_compact_validation(self):
        with pytest.raises(TailMetadataInvalid):
            RadialFunction.compact_support(
                lambda s: (1.0 + np.asarray(s, float)) ** -2.0, 1.0
            )

    def test_tail_inference(self):
        f = RadialFunction.from_expression("(1+r)^-2")
        assert f.tail_exponent == pytest.approx(2.0, abs=1e-4)
        g = RadialFunction.from_expression("exp(-r^2)")
        assert g.compact
        assert 25.0 < g.support_radius < 30.0

    def test_serialization(self):
        f = RadialFunction.from_expression("(1+r)^-2", tail=2.0)
        assert f.to_json_dict() == {"expr": "(1+r)^-2", "tail_exponent": 2.0}


class TestFinitenessCheck:
    def test_power_tails(self):
        u = RadialFunction.from_expression("(1+r)^-2", tail=2.0)
        assert finiteness_check_c1(4, 1.0, 2.0, u) is True
        v = RadialFunction.from_expression("(1+r)^-1", tail=1.0)
        assert finiteness_check_c1(4, 2.0, 1.0, v) is False

    def test_boundary_case_fails(self):
        u = RadialFunction.from_expression("(1+r)^-2", tail=2.0)
        assert finiteness_check_c1(4, 2.0, 1.0, u) is False

    def test_compact_always_passes(self):
        ball = RadialFunction.from_expression("indicator(0,1)")
        assert finiteness_check_c1(4, 3.9, 0.1, ball) is True


class TestAsymptoticProbe:
    def test_power_regime_bounded(self):
        f = RadialFunction.from_expression("(1+r)^-3", tail=3.0)
        probe = asymptotic_probe(4, 1.0, f, 3.0, [10.0, 30.0, 100.0, 300.0])
        assert probe.regime == "power"
        assert probe.bounded

    def test_saturated_regime_reaches_mass_limit(self):
        ball = RadialFunction.from_expression("indicator(0,1)")
        probe = asymptotic_probe(3, 1.0, ball, 4.0, [10.0, 30.0, 100.0, 300.0])
        assert probe.regime == "saturated"
        assert probe.bounded
        ball_volume = 4.0 * math.pi / 3.0
        expected = riesz_constant(3, 1.0) * ball_volume
        assert probe.scaled[-1] == pytest.approx(expected, rel=1e-2)

    def test_log_regime(self):
        f = RadialFunction.from_expression("(1+r)^-3", tail=3.0)
        probe = asymptotic_probe(3, 1.0, f, 3.0, [10.0, 30.0, 100.0, 300.0])
        assert probe.regime == "log"
        assert probe.bounded

    def test_rejects_narrow_radii(self):
        f = RadialFunction.from_expression("(1+r)^-3", tail=3.0)
        with pytest.raises(ValueError):
            asymptotic_probe(4, 1.0, f, 3.0, [10.0, 20.0])


def test_oracle_cross_validation_cartesian():
    # deep check of the kernel-centered oracle itself against a plain
    # Cartesian double integral (N = 2 Gaussian)
    from oracles import cartesian_riesz_oracle_2d, ndim_riesz_oracle

    centered = ndim_riesz_oracle(2, 1.0, lambda s: math.exp(-s * s), 1.0, 12.0)
    cartesian = cartesian_riesz_oracle_2d(1.0, lambda s: math.exp(-s * s), 1.0, 8.0)
    assert centered == pytest.approx(cartesian, rel=1e-5)
