"""Witness construction: coefficient equation, lattice bookkeeping and the
single- and multi-generator pipelines on fast configurations."""

import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperalg import (
    CatalogSymbol,
    DiskGrid,
    ExpPoly,
    ExponentSet,
    PolyTimesExp,
    apply_symbol_power,
    construct_witness_T2,
    construct_witness_multi,
    default_multi_targets,
    default_targets_T2,
    derive_multi_params,
    derive_witness_params,
    enumerate_lattice,
    eval_symbol,
    multinomial_gamma,
    select_weights,
    solve_coeff,
    sup_distance,
    theta_ratio,
    verify_witness,
)
from hyperalg.errors import HypothesisError, TargetPlacementError
from hyperalg.witness import fit_target_exppoly

QUAD = CatalogSymbol("exp-quadratic")


class TestSolveCoeff:
    def test_simple_root(self):
        # c^2 * 4^1 = 1  =>  c = 1/2
        assert solve_coeff(1, 2, 4, 1) == pytest.approx(0.5)

    def test_round_trip(self):
        b, m, phi, n = 2 - 1j, 3, 1.5 + 0.5j, 64
        c = solve_coeff(b, m, phi, n)
        # reassemble in log space (the direct product overflows for large n)
        log_mag = m * math.log(abs(c)) + n * math.log(abs(phi))
        assert log_mag == pytest.approx(math.log(abs(b)), abs=1e-9)

    @given(
        st.integers(min_value=1, max_value=4),
        st.integers(min_value=1, max_value=256),
        st.complex_numbers(
            min_magnitude=0.1, max_magnitude=5.0,
            allow_nan=False, allow_infinity=False,
        ),
    )
    @settings(deadline=None, max_examples=100)
    def test_strict_decay_in_n(self, m, n, b):
        phi = 2.0 + 1.0j  # |phi| > 1
        assert abs(solve_coeff(b, m, phi, n + 1)) < abs(solve_coeff(b, m, phi, n))

    def test_contracting_eigenvalue_rejected(self):
        with pytest.raises(HypothesisError):
            solve_coeff(1, 2, 0.5, 8)

    def test_zero_target_rejected(self):
        with pytest.raises(ValueError):
            solve_coeff(0, 2, 4, 1)


class TestLattice:
    def test_one_term_square_expansion(self):
        l_star, lower = enumerate_lattice(1, 2)
        assert set(l_star) == {((2,), (0,)), ((1,), (1,))}
        assert [set(layer) for layer in lower] == [{((1,), (0,)), ((0,), (1,))}]

    def test_two_term_counts(self):
        l_star, lower = enumerate_lattice(2, 2)
        # C(5, 3) = 10 degree-2 tuples minus the 2 survivors
        assert len(l_star) == 8
        assert len(lower[0]) == 4

    def test_survivors_are_excluded(self):
        l_star, _ = enumerate_lattice(2, 3)
        assert ((0, 0), (3, 0)) not in l_star
        assert ((0, 0), (0, 3)) not in l_star

    def test_gamma_specializations(self):
        a = (0.7 - 0.2j,)
        assert multinomial_gamma((0,), (2,), a) == pytest.approx(1.0)
        assert multinomial_gamma((1,), (1,), a) == pytest.approx(2 * a[0])
        assert multinomial_gamma((2,), (0,), a) == pytest.approx(a[0] ** 2)

    def test_gamma_matches_trinomial(self):
        a = (1.0, 1.0)
        total = sum(
            multinomial_gamma(u, v, a).real
            for u, v in enumerate_lattice(2, 3)[0]
        ) + 2  # add back the two survivors (weight 1 each)
        assert total == pytest.approx(4**3)  # (1+1+1+1)^3

    def test_survivor_ratio_is_exactly_one(self):
        lam = (0.15 + 0.02j,)
        theta, case = theta_ratio(QUAD, (0,), (2,), lam, (0.5,), 2)
        assert theta == pytest.approx(1.0, abs=1e-12)
        assert case == 1

    def test_case_tags(self):
        lam = (0.1,)
        assert theta_ratio(QUAD, (1,), (1,), lam, (0.5,), 2)[1] == 2
        assert theta_ratio(QUAD, (0,), (1,), lam, (0.5,), 2)[1] == 3


class TestWeights:
    def test_reference_exponent_set(self):
        A = ExponentSet.of([(2, 0), (1, 1), (0, 1)])
        k, beta, perm = select_weights(A)
        assert beta in A.exponents
        assert max(a[perm[0]] for a in A.exponents) == beta[perm[0]]

    def test_weights_separate_the_exponents(self):
        A = ExponentSet.of([(2, 0), (1, 1), (0, 1)])
        k, _, perm = select_weights(A)
        keys = {
            sum(w * a[p] for w, p in zip(k, perm)) for a in A.exponents
        }
        assert len(keys) == len(A.exponents)

    @given(
        st.sets(
            st.tuples(
                st.integers(min_value=0, max_value=3),
                st.integers(min_value=0, max_value=3),
            ),
            min_size=1,
            max_size=6,
        ).filter(lambda s: any(a != (0, 0) for a in s))
    )
    @settings(deadline=None, max_examples=60)
    def test_weighted_sums_always_injective(self, exps):
        A = ExponentSet.of([a for a in exps if a != (0, 0)])
        k, beta, perm = select_weights(A)
        keys = [sum(w * a[p] for w, p in zip(k, perm)) for a in A.exponents]
        assert len(set(keys)) == len(keys)

    def test_exponent_set_validation(self):
        with pytest.raises(ValueError):
            ExponentSet.of([(0, 0)])
        with pytest.raises(ValueError):
            ExponentSet.of([])


@pytest.fixture(scope="module")
def params():
    return derive_witness_params(QUAD, 2)


@pytest.fixture(scope="module")
def multi_report():
    A = ExponentSet.of([(2, 0), (1, 1), (0, 1)])
    multi_params = derive_multi_params(QUAD, A)
    B, seeds = default_multi_targets(multi_params, A.n_generators)
    return construct_witness_multi(QUAD, A, B, seeds, params=multi_params), B


class TestSingleGenerator:

    def test_progression_memberships(self, params):
        for j in range(1, params.m + 1):
            assert abs(eval_symbol(QUAD, j * params.w)) < 1

    def test_survivor_frequency_grows(self, params):
        lo, hi = params.lambda_window
        for lam in (lo, hi, (lo + hi) / 2):
            assert abs(eval_symbol(QUAD, params.m * lam)) > 1

    def test_default_targets_are_admissible(self, params):
        seed, target = default_targets_T2(params)
        assert len(seed.terms) == len(target.terms) == 1
        assert abs(seed.terms[0][1] - params.w) <= params.delta
        ratio = target.terms[0][1] / params.w0
        assert abs(ratio.imag) < 1e-9 and 0.5 <= ratio.real <= 1.0

    def test_end_to_end(self, params):
        seed, target = default_targets_T2(params)
        report = construct_witness_T2(QUAD, 2, seed, target, params=params)
        assert all(r <= 1e-6 for r in report.residuals.values())
        assert report.bound_sum <= 1e-6
        survivors = {((0,), (2,))}
        for entry in report.theta_table:
            if (entry.u, entry.v) in survivors:
                assert entry.theta == pytest.approx(1.0, abs=1e-12)
            else:
                assert entry.theta <= 1 - 1e-4
        # the residual trace is what the constructor actually measured
        q, worst = report.trace[-1]
        assert q == report.q and worst <= 1e-6

    def test_report_survives_verification(self, params):
        seed, target = default_targets_T2(params)
        report = construct_witness_T2(QUAD, 2, seed, target, params=params)
        passed, _ = verify_witness(QUAD, report, params.grid, 1e-6)
        assert passed

    def test_tampered_report_fails_verification(self, params):
        seed, target = default_targets_T2(params)
        report = construct_witness_T2(QUAD, 2, seed, target, params=params)
        import dataclasses

        tampered = dataclasses.replace(report, q=report.q // 2)
        passed, _ = verify_witness(QUAD, tampered, params.grid, 1e-6)
        assert not passed

    def test_misplaced_target_rejected(self, params):
        seed, _ = default_targets_T2(params)
        bad_target = ExpPoly.of([(1.0, 100.0)])
        with pytest.raises(TargetPlacementError):
            construct_witness_T2(QUAD, 2, seed, bad_target, params=params)

    def test_report_serializes(self, params):
        seed, target = default_targets_T2(params)
        report = construct_witness_T2(QUAD, 2, seed, target, params=params)
        payload = json.loads(report.to_json())
        assert payload["kind"] == "single"
        assert payload["q"] == report.q

    def test_fit_target_mode_reports_fit_error_separately(self, params):
        grid = DiskGrid(radius=1.0, samples=32, circles=3)
        fit, err = fit_target_exppoly(
            params, lambda z: z * 0 + 1.0, grid, n_freqs=8
        )
        assert len(fit.terms) == 8
        assert err < 1e-6
        assert sup_distance(fit, ExpPoly.one(), grid) < 1e-5


class TestMultiGenerator:
    A = ExponentSet.of([(2, 0), (1, 1), (0, 1)])

    def test_residuals_within_tolerance(self, multi_report):
        rep, _ = multi_report
        assert all(r <= 1e-5 for r in rep.residuals.values())

    def test_survivor_coefficients_reproduce_target(self, multi_report):
        rep, B = multi_report
        values = [complex(re, im) for re, im in rep.params["survivor_values"]]
        for got, (want, _) in zip(values, B.terms):
            assert abs(got - want) / abs(want) < 1e-8

    def test_joint_power_reaches_target(self, multi_report):
        rep, B = multi_report
        f = ExpPoly.one()
        from hyperalg import mul_exppoly, pow_exppoly

        beta = rep.beta
        for g, e in zip(rep.generators, beta):
            f = mul_exppoly(f, pow_exppoly(g, int(e)))
        image = apply_symbol_power(QUAD, f, rep.q)
        grid = DiskGrid(radius=3.0)
        assert sup_distance(image, B, grid) <= 1e-5

    def test_off_target_powers_go_to_zero(self, multi_report):
        rep, _ = multi_report
        from hyperalg import mul_exppoly, pow_exppoly

        grid = DiskGrid(radius=3.0)
        for alpha in rep.exponents:
            if tuple(alpha) == tuple(rep.beta):
                continue
            f = ExpPoly.one()
            for g, e in zip(rep.generators, alpha):
                f = mul_exppoly(f, pow_exppoly(g, int(e)))
            image = apply_symbol_power(QUAD, f, rep.q)
            assert sup_distance(image, ExpPoly.zero(), grid) <= 1e-5

    def test_verification(self, multi_report):
        rep, _ = multi_report
        passed, _ = verify_witness(QUAD, rep, DiskGrid(radius=3.0), 1e-5)
        assert passed

    def test_same_ray_symbol(self):
        spec = PolyTimesExp(poly=(1, 1, 1), a=1)
        params = derive_multi_params(spec, self.A)
        assert params.same_ray
        B, seeds = default_multi_targets(params, self.A.n_generators)
        rep = construct_witness_multi(spec, self.A, B, seeds, params=params)
        assert all(r <= 1e-5 for r in rep.residuals.values())

    def test_unnormalized_symbol_rejected(self):
        spec = CatalogSymbol("exp-poly", a=1, poly=(2, 1))
        with pytest.raises((HypothesisError, ValueError)):
            derive_multi_params(spec, self.A)


class TestDeterminism:
    def test_single_generator_reports_are_byte_identical(self):
        outputs = []
        for _ in range(2):
            params = derive_witness_params(QUAD, 2)
            seed, target = default_targets_T2(params)
            report = construct_witness_T2(QUAD, 2, seed, target, params=params)
            outputs.append(report.to_json().encode())
        assert outputs[0] == outputs[1]
