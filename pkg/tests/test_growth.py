"""Growth estimates, ray scans and the geometric searches built on them."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperalg import (
    CatalogSymbol,
    ExpPolySymbol,
    ExpPoly,
    PolyTimesExp,
    check_Tma_conditions,
    convex_direction,
    estimate_order_type,
    eval_symbol,
    find_arith_progression,
    find_convex_ray,
    indicator,
    max_modulus,
    ray_below_one,
    scan_ray,
    tau0,
)
from hyperalg.errors import HypothesisError

R_GRID = list(np.geomspace(1.0, 60.0, 16))


class TestOrderType:
    def test_exp_has_order_and_type_one(self):
        est = estimate_order_type(CatalogSymbol("exp", a=1), R_GRID)
        assert est.order == pytest.approx(1.0, abs=0.05)
        assert est.type_ == pytest.approx(1.0, abs=0.05)
        assert not est.degenerate

    def test_cos_has_order_one(self):
        est = estimate_order_type(CatalogSymbol("cos"), R_GRID)
        assert est.order == pytest.approx(1.0, abs=0.05)
        assert est.type_ == pytest.approx(1.0, abs=0.05)

    def test_quadratic_exponential_has_order_two(self):
        # the window self-truncates where evaluation overflows
        est = estimate_order_type(CatalogSymbol("exp-quadratic"), R_GRID)
        assert est.order == pytest.approx(2.0, abs=0.1)

    def test_constant_symbol_is_degenerate(self):
        est = estimate_order_type(ExpPolySymbol(ExpPoly.of([(0.5, 0.0)])), R_GRID)
        assert est.degenerate
        assert est.order == 0.0

    def test_max_modulus_of_exp_on_circle(self):
        assert max_modulus(CatalogSymbol("exp", a=1), 2.0) == pytest.approx(
            math.exp(2.0), rel=1e-3
        )

    def test_csv_has_one_row_per_sample(self):
        est = estimate_order_type(CatalogSymbol("cos"), R_GRID)
        lines = est.to_csv().strip().splitlines()
        assert lines[0] == "r,log_max_modulus"
        assert len(lines) == 1 + len(est.samples)


class TestRays:
    def test_scan_matches_direct_evaluation(self):
        spec = CatalogSymbol("cos")
        scan = scan_ray(spec, math.pi / 2, [0.5, 1.0, 2.0])
        for t, m in zip(scan.t_grid, scan.moduli):
            assert m == pytest.approx(math.cosh(t), rel=1e-12)

    def test_indicator_of_exp_along_positive_axis(self):
        assert indicator(
            CatalogSymbol("exp", a=1), 0.0, np.linspace(1, 40, 64)
        ) == pytest.approx(1.0, abs=1e-9)

    def test_tau0_clamps_at_zero(self):
        # e^z decays along the negative axis; the rate is clamped to 0
        assert tau0(CatalogSymbol("exp", a=1), -1.0, np.linspace(1, 40, 64)) == 0.0

    def test_tau0_subexponential_short_circuit(self):
        spec = ExpPolySymbol(ExpPoly.of([(2.0, 0.0)]))
        assert tau0(spec, 1.0, R_GRID, subexponential=True) == 0.0

    def test_ray_below_one_prefix_invariant(self):
        spec = CatalogSymbol("exp", a=1)
        r = ray_below_one(spec, math.pi, 10.0)
        assert r is not None
        ts = np.linspace(1e-3, r, 200)
        assert np.all(np.abs(np.exp(-ts)) < 1.0)

    def test_ray_below_one_rejects_growing_direction(self):
        assert ray_below_one(CatalogSymbol("exp", a=1), 0.0, 10.0) is None


class TestArithProgression:
    def test_cos_progression_memberships(self):
        spec = CatalogSymbol("cos")
        a = find_arith_progression(spec, 5)
        assert a is not None
        for j in range(1, 6):
            assert abs(eval_symbol(spec, j * a)) < 1.0

    def test_poly_exp_progression_found_on_decaying_ray(self):
        spec = CatalogSymbol("exp-poly", a=1, poly=(1, 1))
        a = find_arith_progression(spec, 3)
        assert a is not None
        for j in range(1, 4):
            assert abs(eval_symbol(spec, j * a)) < 1.0

    def test_constant_above_one_has_no_progression(self):
        spec = ExpPolySymbol(ExpPoly.of([(2.0, 0.0)]))
        assert (
            find_arith_progression(spec, 2, a_grid=np.geomspace(1e-3, 0.1, 16))
            is None
        )


def quadrant_reps():
    signs = [1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]
    return [(s1, s2) for s1 in signs for s2 in signs]


class TestConvexDirection:
    def test_closed_form_when_first_coefficient_vanishes(self):
        assert convex_direction(0, 1) == pytest.approx(0.0)
        assert convex_direction(0, -0.5) == pytest.approx(-math.pi / 2)
        theta = convex_direction(0, cmath.exp(0.6j))
        assert (cmath.exp(0.6j) * cmath.exp(2j * theta)).real > 0

    @pytest.mark.parametrize("a1,a2", quadrant_reps())
    def test_all_quadrant_combinations(self, a1, a2):
        theta = convex_direction(a1, a2)
        assert (a1 * cmath.exp(1j * theta)).real > 0
        assert (a2 * cmath.exp(2j * theta)).real > 0

    @given(
        st.complex_numbers(max_magnitude=5.0, allow_nan=False, allow_infinity=False),
        st.complex_numbers(
            min_magnitude=1e-3, max_magnitude=5.0,
            allow_nan=False, allow_infinity=False,
        ),
    )
    @settings(deadline=None, max_examples=300)
    def test_inequalities_hold(self, a1, a2):
        theta = convex_direction(a1, a2)
        first = (a1 * cmath.exp(1j * theta)).real
        second = (a2 * cmath.exp(2j * theta)).real
        assert first >= 0
        if a1 != 0:
            assert first > 0
        assert second > 0

    def test_zero_second_coefficient_rejected(self):
        with pytest.raises(ValueError):
            convex_direction(1, 0)


class TestConvexRay:
    def test_cos_goes_up_the_imaginary_axis(self):
        ray = find_convex_ray(CatalogSymbol("cos"), 0, 0.5)
        # log|cos| grows fastest along +/- i; the profile is log cosh
        assert abs(abs(math.sin(ray.theta)) - 1) < 1e-3
        for t, p in zip(ray.t_grid, ray.profile):
            expected = math.log(abs(cmath.cos(t * ray.w1)))
            assert p == pytest.approx(expected, rel=1e-9, abs=1e-12)

    def test_quadratic_exponential_profile_is_exact_parabola(self):
        ray = find_convex_ray(CatalogSymbol("exp-quadratic"), 0, 0.5)
        eta = abs(ray.w1)
        for t, p in zip(ray.t_grid, ray.profile):
            assert p == pytest.approx(
                ((t * eta) ** 2 * cmath.exp(2j * ray.theta)).real, abs=1e-10
            )

    def test_profile_is_strictly_increasing_and_convex(self):
        for spec in (CatalogSymbol("cos"), CatalogSymbol("exp-quadratic")):
            ray = find_convex_ray(spec, 0, 0.5)
            d1 = np.diff(ray.profile)
            assert np.all(d1 > 0)
            assert np.all(np.diff(d1) > 0)

    def test_two_sided_domain_when_slope_is_nonzero(self):
        spec = PolyTimesExp(poly=(1, 1, 1), a=1)
        ray = find_convex_ray(spec, 0, 0.5)
        assert ray.domain[0] == -1.0

    def test_pure_exponential_rejected(self):
        with pytest.raises(HypothesisError):
            find_convex_ray(CatalogSymbol("exp", a=1), 0, 0.5)

    def test_vanishing_base_point_rejected(self):
        with pytest.raises(HypothesisError):
            find_convex_ray(CatalogSymbol("cos"), math.pi / 2, 0.5)


class TestTmaConditions:
    def test_pure_exponential_never_beats_its_envelope(self):
        assert (
            check_Tma_conditions(
                CatalogSymbol("exp", a=1), 0.0, 10.0, np.linspace(1, 40, 64)
            )
            is None
        )

    def test_cos_on_imaginary_axis_stays_below(self):
        assert (
            check_Tma_conditions(
                CatalogSymbol("cos"), math.pi / 2, 10.0, np.linspace(1, 40, 64)
            )
            is None
        )

    def test_subexponential_with_dip_below_one_qualifies(self):
        # 1 - z + z^3 dips under 1 near 0 on the real axis, then grows
        # polynomially past every sampled rate estimate
        spec = PolyTimesExp(poly=(1, -1, 0, 1), a=0)
        pair = check_Tma_conditions(spec, 0.0, 0.5, np.linspace(1, 40, 64))
        assert pair is not None
        r, R = pair
        assert 0 < r < R
        assert abs(eval_symbol(spec, r)) < 1
        assert abs(eval_symbol(spec, R)) > 1
