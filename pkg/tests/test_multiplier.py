"""Tests for the multiplier evaluation paths and tables.

The independent oracle for the one-dimensional beta = 0 kernel is the
elementary integral c * int_{-d}^{d} (cos(r z) - 1) dz, with
c = 3 / d^3, giving m = (3/d^3)(2 sin(r d)/r - 2 d).  Cross-path
agreement between the hypergeometric, quadrature, corrected-quadrature and
radial-series routes is the oracle everywhere else, with mpmath confirming
the hypergeometric values at spot-check parameters.
"""

import math
import time

import mpmath
import numpy as np
import pytest

from periwave.errors import DomainError, NonConvergenceError
from periwave.multiplier import (
    KernelParams,
    MultiplierTable,
    build_table,
    distinct_squared_norms,
    monotonicity_scan,
    multiplier_asymptotic,
    multiplier_extended_quadrature,
    multiplier_hypergeometric,
    multiplier_quadrature,
    multiplier_radial_series,
    scaling_constant,
)
from periwave.specfun import EULER_GAMMA

mpmath.mp.dps = 40


def closed_form_1d_beta0(delta: float, r: float) -> float:
    """Elementary-integral oracle for n=1, beta=0."""
    return 3.0 / delta ** 3 * (2.0 * math.sin(r * delta) / r - 2.0 * delta)


class TestKernelParams:
    def test_validation(self):
        with pytest.raises(DomainError):
            KernelParams(0, 1.0, 0.0)
        with pytest.raises(DomainError):
            KernelParams(1, 0.0, 0.0)
        with pytest.raises(DomainError):
            KernelParams(1, 1.0, 5.0)  # beta >= n + 4
        KernelParams(1, 1.0, 4.999999)  # just inside


class TestScalingConstant:
    def test_examples(self):
        assert scaling_constant(KernelParams(1, 1.0, 1.0)) == pytest.approx(2.0, rel=1e-14)
        assert scaling_constant(KernelParams(1, 1.0, 3.0)) == 0.0
        assert scaling_constant(KernelParams(2, 1.0, 2.0)) == pytest.approx(4.0 / math.pi, rel=1e-14)

    def test_sign_change_at_critical_exponent(self):
        for n in (1, 2, 3):
            for delta in (0.5, 2.0):
                assert scaling_constant(KernelParams(n, delta, n + 1.0)) > 0
                assert scaling_constant(KernelParams(n, delta, float(n + 2))) == 0.0
                assert scaling_constant(KernelParams(n, delta, n + 3.0)) < 0


class TestHypergeometricPath:
    def test_zero_frequency(self):
        assert multiplier_hypergeometric(KernelParams(2, 0.7, 1.3), 0.0) == 0.0

    def test_critical_exponent_is_minus_r_squared(self):
        assert multiplier_hypergeometric(KernelParams(1, 1.0, 3.0), 2.0) == -4.0

    def test_closed_form_unit_horizon(self):
        value = multiplier_hypergeometric(KernelParams(1, 1.0, 0.0), 1.0)
        assert value == pytest.approx(closed_form_1d_beta0(1.0, 1.0), rel=1e-12)

    def test_closed_form_small_horizon(self):
        value = multiplier_hypergeometric(KernelParams(1, 0.1, 0.0), 1.0)
        assert value == pytest.approx(closed_form_1d_beta0(0.1, 1.0), rel=1e-12)
        # leading deviation from the local multiplier is delta^2/20
        assert value + 1.0 == pytest.approx(0.1 ** 2 / 20.0, rel=1e-2)

    def test_against_mpmath(self):
        for n, delta, beta, r in [(1, 1.0, 1.5, 2.0), (2, 0.5, 3.2, 4.0), (3, 2.0, 6.5, 1.0)]:
            ref = float(-r * r * mpmath.hyper(
                [1, (n + 2 - beta) / 2],
                [2, (n + 2) / 2, (n + 4 - beta) / 2],
                -0.25 * r * r * delta * delta))
            assert multiplier_hypergeometric(KernelParams(n, delta, beta), r) \
                == pytest.approx(ref, rel=1e-12)

    def test_large_argument_falls_back_to_quadrature(self):
        # r delta = 200 forces catastrophic cancellation in the series
        params = KernelParams(1, 1.0, 1.0)
        value = multiplier_hypergeometric(params, 200.0)
        assert value == pytest.approx(multiplier_quadrature(params, 200.0), rel=1e-9)


class TestQuadraturePath:
    def test_zero_frequency(self):
        assert multiplier_quadrature(KernelParams(1, 1.0, 0.5), 0.0) == 0.0

    def test_closed_form(self):
        assert multiplier_quadrature(KernelParams(1, 1.0, 0.0), 1.0) \
            == pytest.approx(closed_form_1d_beta0(1.0, 1.0), rel=1e-11)

    def test_cross_path_2d(self):
        params = KernelParams(2, 1.0, 1.0)
        quad = multiplier_quadrature(params, 3.0)
        hyp = multiplier_hypergeometric(params, 3.0)
        assert abs(quad - hyp) <= 1e-8 * (1 + abs(quad))

    def test_rejects_super_diffusive_exponent(self):
        with pytest.raises(DomainError):
            multiplier_quadrature(KernelParams(1, 1.0, 3.0), 1.0)

    def test_rejects_high_dimension(self):
        with pytest.raises(DomainError):
            multiplier_quadrature(KernelParams(4, 1.0, 0.0), 1.0)


class TestExtendedQuadraturePath:
    def test_critical_exponent(self):
        assert multiplier_extended_quadrature(KernelParams(1, 1.0, 3.0), 2.0) == -4.0

    def test_coincides_with_plain_quadrature_below_critical(self):
        params = KernelParams(1, 1.0, 0.0)
        ext = multiplier_extended_quadrature(params, 1.0)
        assert ext == pytest.approx(multiplier_quadrature(params, 1.0), rel=1e-10)

    def test_super_diffusive_cross_path(self):
        params = KernelParams(1, 1.0, 3.5)
        ext = multiplier_extended_quadrature(params, 1.0)
        hyp = multiplier_hypergeometric(params, 1.0)
        assert abs(ext - hyp) <= 1e-8 * (1 + abs(hyp))


class TestRadialSeriesPath:
    def test_zero_frequency(self):
        assert multiplier_radial_series(KernelParams(2, 1.0, 1.0), 0.0) == 0.0

    def test_closed_form(self):
        assert multiplier_radial_series(KernelParams(1, 1.0, 0.0), 1.0) \
            == pytest.approx(closed_form_1d_beta0(1.0, 1.0), rel=1e-11)

    def test_cross_path_3d(self):
        params = KernelParams(3, 2.0, 4.0)
        ser = multiplier_radial_series(params, 1.0)
        hyp = multiplier_hypergeometric(params, 1.0)
        assert abs(ser - hyp) <= 1e-8 * (1 + abs(hyp))

    def test_rejects_critical_exponent(self):
        with pytest.raises(DomainError):
            multiplier_radial_series(KernelParams(1, 1.0, 3.0), 1.0)


class TestAsymptotic:
    def test_log_branch_value(self):
        # n = 2 = beta, delta = 1, r = 10: -(2n/d^2)(2 log r + log(d^2/4) + gamma - psi(1))
        # with psi(1) = -gamma
        expected = -4.0 * (2.0 * math.log(10.0) - math.log(4.0) + 2.0 * EULER_GAMMA)
        value = multiplier_asymptotic(KernelParams(2, 1.0, 2.0), 10.0)
        assert value == pytest.approx(expected, rel=1e-12)
        assert value == pytest.approx(-17.4932, abs=5e-4)

    def test_integrable_kernel_limit(self):
        # beta < n: the r-power decays, so m tends to -2n(n+2-beta)/(d^2(n-beta))
        params = KernelParams(1, 1.0, 0.0)
        assert multiplier_hypergeometric(params, 1e4) == pytest.approx(-6.0, rel=1e-2)
        assert multiplier_asymptotic(params, 1e6) == pytest.approx(-6.0, rel=1e-3)

    def test_ratio_at_moderate_frequency(self):
        params = KernelParams(1, 2.0, 2.0)
        ratio = multiplier_hypergeometric(params, 100.0) / multiplier_asymptotic(params, 100.0)
        assert 0.99 <= ratio <= 1.01

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            multiplier_asymptotic(KernelParams(1, 1.0, 3.0), 10.0)  # beta = n+2
        with pytest.raises(DomainError):
            multiplier_asymptotic(KernelParams(1, 1.0, 1.5), 0.5)  # r <= 1


class TestPathAgreementProperty:
    def test_sampled_grid(self):
        # subset of the acceptance grid; the full sweep runs in acceptance
        for n in (1, 2, 3):
            for delta in (0.5, 2.0):
                for beta in (-1.0, float(n), n + 1.9, n + 3.5):
                    params = KernelParams(n, delta, beta)
                    for r in (0.5, 5.0):
                        values = [
                            multiplier_hypergeometric(params, r),
                            multiplier_extended_quadrature(params, r),
                            multiplier_radial_series(params, r),
                        ]
                        if beta < n + 2:
                            values.append(multiplier_quadrature(params, r))
                        base = values[1]
                        for v in values:
                            assert abs(v - base) <= 1e-7 * (1 + abs(base))

    def test_sign_and_zero(self):
        rng = np.random.default_rng(4)
        for _ in range(40):
            n = int(rng.integers(1, 4))
            params = KernelParams(n, float(rng.uniform(0.2, 3.0)),
                                  float(rng.uniform(-2.0, n + 3.9)))
            assert multiplier_hypergeometric(params, 0.0) == 0.0
            r = float(rng.uniform(0.1, 20.0))
            assert multiplier_hypergeometric(params, r) < 0.0


class TestLimits:
    def test_horizon_limit_recovers_laplacian(self):
        # m + r^2 -> 0 along delta_j = 2^-j, for sub- and super-critical beta
        for n, beta, r in [(1, 0.0, 1.0), (2, 3.0, 2.0), (1, 3.5, 1.0)]:
            gaps = []
            for j in range(2, 7):
                params = KernelParams(n, 2.0 ** -j, beta)
                gaps.append(abs(multiplier_hypergeometric(params, r) + r * r))
            assert all(b < a for a, b in zip(gaps, gaps[1:]))
            assert gaps[-1] < 1e-3 * r * r

    def test_horizon_rate_closed_form_case(self):
        # the n=1, beta=0 error is delta^2/20 + O(delta^4)
        for delta in (0.1, 0.05, 0.025):
            value = multiplier_hypergeometric(KernelParams(1, delta, 0.0), 1.0)
            measured = abs(value + 1.0)
            predicted = delta ** 2 / 20.0
            assert predicted / 2.0 <= measured <= predicted * 2.0

    def test_exponent_limit_from_both_sides(self):
        r = 3.0
        for side in (+1.0, -1.0):
            gaps = []
            for eps in (0.4, 0.2, 0.1, 0.05):
                params = KernelParams(2, 1.0, 4.0 + side * eps)
                gaps.append(abs(multiplier_hypergeometric(params, r) + r * r))
            assert all(b < a for a, b in zip(gaps, gaps[1:]))
            assert gaps[-1] < 0.5


class TestBuildTable:
    def test_laplacian_table_values(self):
        table = build_table(KernelParams(1, 1.0, 3.0), 3)
        assert table.values == {0: 0.0, 1: -1.0, 4: -4.0, 9: -9.0}

    def test_zero_entry_exact(self):
        table = build_table(KernelParams(2, 0.7, 1.1), 4)
        assert table.values[0] == 0.0

    def test_oracle_sweep_2d(self):
        params = KernelParams(2, 0.5, 2.0)
        table = build_table(params, 8)
        for kk2, value in table.values.items():
            if kk2 == 0:
                continue
            oracle = multiplier_quadrature(params, math.sqrt(kk2))
            assert abs(value - oracle) <= 1e-7 * (1 + abs(oracle))

    def test_covers_all_squared_norms(self):
        for n, K in [(1, 5), (2, 4), (3, 3)]:
            table = build_table(KernelParams(n, 1.0, 1.0), K)
            assert sorted(table.values) == distinct_squared_norms(n, K)
            assert all(v <= 0.0 for v in table.values.values())
            assert set(table.paths) == set(table.values)

    def test_invariant_enforcement(self):
        params = KernelParams(1, 1.0, 1.0)
        with pytest.raises(DomainError):
            MultiplierTable(params, 1, {0: 0.0, 1: 0.5})
        with pytest.raises(DomainError):
            MultiplierTable(params, 1, {1: -1.0})  # missing the zero entry


class TestMonotonicityScan:
    def test_strictly_decreasing_and_negative(self):
        scan = monotonicity_scan(1, 1.0, 1.0, [2.6, 3.0, 3.4, 3.8, 4.2])
        assert scan.verdict
        assert scan.strictly_decreasing and scan.all_negative

    def test_value_at_critical_exponent(self):
        scan = monotonicity_scan(1, 1.0, 1.0, [2.8, 3.0, 3.2])
        assert scan.values[1] == -1.0

    def test_single_point_grid_is_vacuously_monotone(self):
        scan = monotonicity_scan(1, 1.0, 1.0, [3.3])
        assert scan.verdict

    def test_rejects_grid_outside_interval(self):
        with pytest.raises(DomainError):
            monotonicity_scan(1, 1.0, 1.0, [2.0, 3.0])  # 2.0 <= (n+4)/2
        with pytest.raises(DomainError):
            monotonicity_scan(1, 1.0, 1.0, [3.0, 5.0])  # 5.0 >= n+4

    def test_rejects_unsorted_grid(self):
        with pytest.raises(DomainError):
            monotonicity_scan(1, 1.0, 1.0, [3.0, 2.9])

    def test_pairwise_ordering_matches_direct_evaluation(self):
        # adjacent grid values satisfy m(b2) < m(b1) < 0 for several (n, r)
        for n, r in [(1, 1.0), (2, 2.0), (3, 0.5)]:
            grid = np.linspace((n + 4) / 2 + 0.1, n + 3.9, 9)
            scan = monotonicity_scan(n, 1.0, r, grid)
            assert scan.verdict


class TestRuntimeBudget:
    def test_table_build_is_fast(self):
        start = time.monotonic()
        build_table(KernelParams(2, 1.0, 3.5), 16)
        assert time.monotonic() - start < 5.0
