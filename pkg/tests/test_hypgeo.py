import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyprobin.hypgeo import (
    SpaceParams,
    af_rhs,
    ball_curvature_integral,
    ball_geometry,
    ball_parallel_perimeter,
    ball_perimeter,
    ball_volume,
    radius_from_perimeter,
    steiner_outer_perimeter,
    unit_sphere_area,
)

SP2 = SpaceParams(2)
SP3 = SpaceParams(3)
SP4 = SpaceParams(4)


class TestUnitSphereArea:
    def test_circle(self):
        assert unit_sphere_area(2) == pytest.approx(2 * math.pi, rel=1e-15)

    def test_two_sphere(self):
        assert unit_sphere_area(3) == pytest.approx(4 * math.pi, rel=1e-15)

    def test_three_sphere(self):
        # 2 pi^2 / Gamma(2) with Gamma(2) = 1
        assert unit_sphere_area(4) == pytest.approx(2 * math.pi**2, rel=1e-15)

    @pytest.mark.parametrize("n", range(2, 12))
    def test_gamma_accuracy(self, n):
        exact = 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)
        assert abs(unit_sphere_area(n) - exact) <= 1e-12 * exact

    @pytest.mark.parametrize("bad", [1, 0, -3])
    def test_rejects_low_dimension(self, bad):
        with pytest.raises(ValueError):
            unit_sphere_area(bad)


class TestBallPerimeterVolume:
    def test_perimeter_n2(self):
        assert ball_perimeter(SP2, 1.0) == pytest.approx(7.384006872882645,
                                                         rel=1e-12)

    def test_perimeter_small_radius_euclidean_limit(self):
        # n=3 leading order 4 pi R^2
        R = 1e-4
        assert ball_perimeter(SP3, R) == pytest.approx(4 * math.pi * R**2,
                                                       rel=1e-7)

    def test_volume_n2_closed_form(self):
        assert ball_volume(SP2, 1.0) == pytest.approx(3.412276265284902,
                                                      rel=1e-12)

    def test_volume_n2_small_radius(self):
        R = 1e-5
        assert ball_volume(SP2, R) == pytest.approx(math.pi * R**2, rel=1e-9)

    def test_volume_n3_quadrature_matches_closed_form(self):
        # integral of sinh^2 = (sinh 2R - 2R)/4, so 4pi * that
        assert ball_volume(SP3, 1.0) == pytest.approx(5.110932705708289,
                                                      abs=1e-10)

    def test_volume_n4_against_dense_simpson(self):
        # frozen from an independent 20001-point Simpson rule
        assert ball_volume(SP4, 1.0) == pytest.approx(6.875719588241426,
                                                      abs=1e-9)

    @pytest.mark.parametrize("fn", [ball_perimeter, ball_volume])
    @pytest.mark.parametrize("R", [0.0, -1.0])
    def test_rejects_nonpositive_radius(self, fn, R):
        with pytest.raises(ValueError):
            fn(SP2, R)

    @given(st.floats(min_value=0.05, max_value=4.0),
           st.floats(min_value=1e-3, max_value=0.5))
    @settings(max_examples=40, deadline=None)
    def test_strictly_increasing_in_radius(self, R, dR):
        assert ball_perimeter(SP3, R + dR) > ball_perimeter(SP3, R)
        assert ball_volume(SP3, R + dR) > ball_volume(SP3, R)

    def test_geometry_bundle(self):
        g = ball_geometry(SP2, 0.7)
        assert g.perimeter == ball_perimeter(SP2, 0.7)
        assert g.volume == ball_volume(SP2, 0.7)


class TestRadiusFromPerimeter:
    def test_unit_circle_perimeter(self):
        assert radius_from_perimeter(SP2, 2 * math.pi) == pytest.approx(
            0.881373587019543, rel=1e-12)

    @pytest.mark.parametrize("sp,R", [(SP2, 1.0), (SP3, 0.5), (SP4, 2.0)])
    def test_round_trip(self, sp, R):
        P = ball_perimeter(sp, R)
        assert radius_from_perimeter(sp, P) == pytest.approx(R, rel=1e-10)
        assert ball_perimeter(sp, radius_from_perimeter(sp, P)) == \
            pytest.approx(P, rel=1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            radius_from_perimeter(SP2, 0.0)


class TestParallelPerimeter:
    def test_zero_offset(self):
        assert ball_parallel_perimeter(SP2, 1.0, 0.0) == pytest.approx(
            ball_perimeter(SP2, 1.0), rel=1e-15)

    def test_half_offset(self):
        assert ball_parallel_perimeter(SP2, 1.0, 0.5) == pytest.approx(
            3.2741383671185713, rel=1e-12)

    @pytest.mark.parametrize("sp", [SP2, SP3, SP4])
    def test_collapse_at_inradius(self, sp):
        assert ball_parallel_perimeter(sp, 1.0, 1.0 - 1e-9) < 1e-7 * sp.omega

    @pytest.mark.parametrize("t", [1.0, 1.5, -0.1])
    def test_rejects_bad_offset(self, t):
        with pytest.raises(ValueError):
            ball_parallel_perimeter(SP2, 1.0, t)


class TestCurvatureIntegral:
    @pytest.mark.parametrize("sp,R", [(SP2, 0.4), (SP3, 1.0), (SP4, 2.0)])
    def test_top_index_is_perimeter(self, sp, R):
        assert ball_curvature_integral(sp, R, sp.n - 1) == pytest.approx(
            ball_perimeter(sp, R), rel=1e-14)

    def test_n2_gauss_bonnet(self):
        # 2pi sinh(1) coth(1) = 2pi cosh(1) = 2pi + area of B_1
        v0 = ball_curvature_integral(SP2, 1.0, 0)
        assert v0 == pytest.approx(9.695461572464488, rel=1e-12)
        assert v0 == pytest.approx(2 * math.pi + ball_volume(SP2, 1.0),
                                   rel=1e-12)

    def test_n3_bottom_index(self):
        assert ball_curvature_integral(SP3, 1.0, 0) == pytest.approx(
            29.92175799613061, rel=1e-12)

    @pytest.mark.parametrize("i", [-1, 4])
    def test_rejects_out_of_range_index(self, i):
        with pytest.raises(ValueError):
            ball_curvature_integral(SP4, 1.0, i)


class TestAfRhs:
    @given(st.floats(min_value=0.1, max_value=100.0))
    @settings(max_examples=40, deadline=None)
    def test_n2_reduces_to_sqrt(self, P):
        assert af_rhs(SP2, P) == pytest.approx(
            math.sqrt(P**2 + 4 * math.pi**2), rel=1e-13)

    @pytest.mark.parametrize("R", [0.3, 1.0, 2.0])
    def test_n2_ball_derivative(self, R):
        P = ball_perimeter(SP2, R)
        assert af_rhs(SP2, P) == pytest.approx(2 * math.pi * math.cosh(R),
                                               rel=1e-12)

    @pytest.mark.parametrize("R", [0.3, 1.0, 2.0])
    def test_n3_ball_derivative(self, R):
        P = ball_perimeter(SP3, R)
        expected = 8 * math.pi * math.sinh(R) * math.cosh(R)
        assert af_rhs(SP3, P) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("sp", [SP2, SP3, SP4])
    @pytest.mark.parametrize("R", [0.3, 1.0, 2.0])
    def test_equality_on_balls(self, sp, R):
        # af_rhs at the ball perimeter equals (n-1) * V_{n-2}
        lhs = af_rhs(sp, ball_perimeter(sp, R))
        rhs = (sp.n - 1) * ball_curvature_integral(sp, R, sp.n - 2)
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            af_rhs(SP3, -1.0)


def _ball_curvature_vector(sp, R):
    return [ball_curvature_integral(sp, R, i) for i in range(sp.n)]


class TestSteiner:
    @pytest.mark.parametrize("sp,R", [(SP2, 1.0), (SP3, 0.5), (SP4, 2.0)])
    def test_zero_offset_gives_perimeter(self, sp, R):
        V = _ball_curvature_vector(sp, R)
        assert steiner_outer_perimeter(sp, V, 0.0) == pytest.approx(
            ball_perimeter(sp, R), rel=1e-14)

    @pytest.mark.parametrize("sp", [SP2, SP3, SP4])
    @pytest.mark.parametrize("R", [0.3, 1.0, 2.0])
    @pytest.mark.parametrize("s", [0.0, 0.25, 0.5, 1.0])
    def test_ball_identity(self, sp, R, s):
        V = _ball_curvature_vector(sp, R)
        got = steiner_outer_perimeter(sp, V, s)
        want = ball_perimeter(sp, R + s)
        assert abs(got - want) <= 1e-10 * want

    def test_n2_gauss_bonnet_form(self):
        # V = (2pi + A, P) gives P cosh s + (2pi + A) sinh s
        P, A, s = 5.0, 1.7, 0.4
        got = steiner_outer_perimeter(SP2, [2 * math.pi + A, P], s)
        want = P * math.cosh(s) + (2 * math.pi + A) * math.sinh(s)
        assert got == pytest.approx(want, rel=1e-14)

    @pytest.mark.parametrize("sp,R", [(SP2, 1.0), (SP3, 1.0), (SP4, 0.5)])
    def test_derivative_identity_at_zero(self, sp, R):
        # d/ds P(K^s) at s=0 equals (n-1) V_{n-2}; centered difference on
        # the polynomial extension of the Steiner formula (the op itself
        # gates s >= 0, so the oracle expands the sum directly)
        V = _ball_curvature_vector(sp, R)
        m = sp.n - 1

        def formula(s):
            return sum(math.comb(m, i) * math.cosh(s)**i
                       * math.sinh(s)**(m - i) * V[i] for i in range(sp.n))

        h = 1e-5
        fd = (formula(h) - formula(-h)) / (2 * h)
        assert formula(h) == pytest.approx(steiner_outer_perimeter(sp, V, h),
                                           rel=1e-14)
        want = (sp.n - 1) * ball_curvature_integral(sp, R, sp.n - 2)
        assert fd == pytest.approx(want, rel=1e-6)

    def test_rejects_wrong_vector_length(self):
        with pytest.raises(ValueError):
            steiner_outer_perimeter(SP3, [1.0, 2.0], 0.1)

    def test_rejects_negative_offset(self):
        with pytest.raises(ValueError):
            steiner_outer_perimeter(SP2, [1.0, 2.0], -0.1)
