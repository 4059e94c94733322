import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swapsim.geometry import MeasurementDirection, agreement_probability, equatorial_agreement
from swapsim.harness import estimate_agreement_p1
from swapsim.oracle import (
    TERMS_GEQ,
    TERMS_LESS,
    OracleDomainError,
    WeightViolation,
    compose_protocol2,
    integral_agreement,
    integral_agreement_geq,
    integral_agreement_less,
    oracle_agreement,
    symmetry_residuals,
    verify_table_bounds,
    warmup_agreement,
    warmup_weighted_agreement,
)
from swapsim.quadrature import QuadratureConfig, integrate_region, iterated_simpson

PI = math.pi
Q = PI / 4


def closed(pa, pb):
    return (1 - math.cos(pa - pb)) / 2


class TestQuadrature:
    def test_rectangle_polynomial_exact(self):
        # Simpson integrates cubics exactly
        val = iterated_simpson(lambda x, y: x**3 * y**2 + x * y, 0.0, 1.0, 0.0, 2.0, 2)
        assert val == pytest.approx(8 / 12 + 1, abs=1e-14)

    def test_triangle(self):
        # area of {0 <= y <= x <= 1}
        assert integrate_region(lambda x, y: np.ones_like(y), 0.0, 1.0, 0.0, lambda x: x) == pytest.approx(0.5, abs=1e-12)

    def test_trig_double_integral(self):
        val = integrate_region(lambda x, y: np.cos(x - y), 0.0, 1.0, lambda x: x, 1.0)
        assert val == pytest.approx(1 - math.cos(1.0), abs=1e-10)

    @pytest.mark.parametrize("method", ["simpson", "adaptive"])
    def test_methods_agree(self, method):
        cfg = QuadratureConfig(method=method)
        val = integrate_region(lambda x, y: np.sin(x + 2 * y), 0.1, 0.7, 0.0, lambda x: x, cfg)
        exact = integrate_region(lambda x, y: np.sin(x + 2 * y), 0.1, 0.7, 0.0, lambda x: x,
                                 QuadratureConfig(abs_tol=1e-13))
        assert val == pytest.approx(exact, abs=1e-9)

    def test_step_halving_changes_less_than_tol(self):
        f = lambda x, y: np.cos(1.3 - y) * np.ones_like(x)
        for n in (64, 128):
            a = iterated_simpson(f, 0.0, 0.5, lambda x: x, 0.7, n)
            b = iterated_simpson(f, 0.0, 0.5, lambda x: x, 0.7, 2 * n)
            assert abs(a - b) < QuadratureConfig().abs_tol

    def test_config_validation(self):
        with pytest.raises(ValueError):
            QuadratureConfig(abs_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureConfig(method="gauss")


class TestIntegralSums:
    def test_terms_are_nine_each(self):
        assert len(TERMS_LESS) == len(TERMS_GEQ) == 9

    def test_less_example(self):
        assert integral_agreement_less(0.1, 0.7) == pytest.approx(closed(0.1, 0.7), abs=1e-6)
        assert closed(0.1, 0.7) == pytest.approx(0.087332, abs=1e-6)

    def test_less_rejects_equal_zero(self):
        with pytest.raises(OracleDomainError):
            integral_agreement_less(0.0, 0.0)

    def test_geq_examples(self):
        assert integral_agreement_geq(0.2, 0.1) == pytest.approx(0.0024979, abs=1e-6)
        assert integral_agreement_geq(0.15, 0.15) == pytest.approx(0.0, abs=1e-6)

    def test_geq_rejects_wrong_case(self):
        with pytest.raises(OracleDomainError):
            integral_agreement_geq(0.1, 0.7)

    def test_outside_fundamental_domain(self):
        with pytest.raises(OracleDomainError):
            integral_agreement(Q, 0.5)
        with pytest.raises(OracleDomainError):
            integral_agreement(0.1, PI)

    def test_grid_all_columns_both_cases(self):
        seen = set()
        worst = 0.0
        for pa in (np.arange(20) + 0.5) * Q / 20:
            for pb in (np.arange(20) + 0.5) * PI / 20:
                jb = int(4 * pb / PI)
                case = pa < pb - jb * Q
                seen.add((jb, case))
                worst = max(worst, abs(integral_agreement(pa, pb) - closed(pa, pb)))
        assert worst <= 1e-6
        assert {jb for jb, _ in seen} == {0, 1, 2, 3}
        assert {c for _, c in seen} == {True, False}

    def test_breakdown_sums_to_value(self):
        res = integral_agreement_less(0.1, 1.2, breakdown=True)
        assert len(res.terms) == 9
        assert math.fsum(v for _, v in res.terms) == res.value

    def test_general_angles(self, rng):
        for pa, pb in rng.uniform(-7, 7, size=(30, 2)):
            assert oracle_agreement(pa, pb) == pytest.approx(closed(pa, pb), abs=1e-6)

    def test_symmetry_relations(self, rng):
        for pa, pb in rng.uniform(0, 2 * PI, size=(10, 2)):
            res = symmetry_residuals(pa, pb)
            assert len(res) == 10
            assert max(abs(v) for v in res.values()) <= 1e-6

    def test_matches_sampler(self, rng):
        for k, (pa, pb) in enumerate(rng.uniform(0, 2 * PI, size=(20, 2))):
            est = estimate_agreement_p1(pa, pb, 200_000, 500 + k)
            assert abs(est.z(oracle_agreement(pa, pb))) <= 4.5


class TestWarmup:
    def test_quadratic_example(self):
        assert warmup_agreement(4, 0.0, PI / 8) == pytest.approx(0.125, abs=1e-15)

    def test_equal_and_symmetric(self):
        assert warmup_agreement(5, 0.3, 0.3) == 0.0
        assert warmup_agreement(4, 0.1, 0.6) == warmup_agreement(4, 0.6, 0.1)

    def test_out_of_sector(self):
        with pytest.raises(OracleDomainError):
            warmup_agreement(4, 0.0, 1.0)

    def test_weighted_example(self):
        res = warmup_weighted_agreement(4, 0.0, PI / 8)
        assert res.closed_form == pytest.approx(0.0380602, abs=1e-7)
        assert res.integral == pytest.approx(res.closed_form, abs=1e-6)

    def test_weighted_zero_delta(self):
        assert warmup_weighted_agreement(4, 0.5, 0.5).integral == 0.0

    @pytest.mark.parametrize("m", [3, 4, 6, 10])
    def test_weighted_grid(self, m):
        for pa in np.linspace(0, PI / m, 5):
            for pb in np.linspace(0, PI / m, 5):
                assert warmup_weighted_agreement(m, pa, pb).discrepancy <= 1e-6

    def test_m2_violates(self):
        assert PI**2 / 8 > 1
        with pytest.raises(WeightViolation):
            warmup_weighted_agreement(2, 0.0, 0.5)


class TestComposition:
    @given(st.floats(0, 1))
    def test_both_polar_zero(self, p):
        assert compose_protocol2(p, 0.0, 0.0) == 0.0

    @given(st.floats(0, 1))
    def test_opposite_poles(self, p):
        assert compose_protocol2(p, 0.0, PI) == pytest.approx(1.0, abs=1e-15)

    def test_orthogonal_equator(self):
        assert compose_protocol2(0.5, PI / 2, PI / 2) == pytest.approx(0.5, abs=1e-15)

    def test_rejects_non_probability(self):
        with pytest.raises(ValueError):
            compose_protocol2(1.5, 0.0, 0.0)

    def test_reproduces_singlet(self, rng):
        for _ in range(10_000):
            x, y = MeasurementDirection.random(rng), MeasurementDirection.random(rng)
            p = compose_protocol2(equatorial_agreement(x.phi, y.phi), x.theta, y.theta)
            assert abs(p - agreement_probability(x, y)) <= 1e-12


class TestTableBounds:
    def test_jb0_000(self):
        row = next(r for r in verify_table_bounds(1001).rows if r.key == (0, 0, 0, 0))
        assert row.minimum == pytest.approx(PI**2 / 32 * math.cos(Q), abs=1e-12)
        assert row.minimum == pytest.approx(0.21809, abs=1e-5)
        assert row.maximum == pytest.approx(PI**2 / 32, abs=1e-12)
        assert row.ok

    def test_jb3_011_constant(self):
        row = next(r for r in verify_table_bounds(1001).rows if r.key == (3, 0, 1, 1))
        assert row.minimum == row.maximum == 1.0

    def test_all_pass(self):
        report = verify_table_bounds(100_000)
        assert len(report.rows) == 32 and report.ok and not report.failures

    def test_grid_points_validated(self):
        with pytest.raises(ValueError):
            verify_table_bounds(1)
