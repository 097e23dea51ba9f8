"""Tests for the scalar special functions.

Oracles: mpmath at 50 digits for 2F3 and the gamma family, the classical
series psi(x) = -gamma + sum(1/(k+1) - 1/(k+x)) with an integral tail
correction for digamma, and exact identities (factorial, duplication,
recurrence) evaluated independently of the implementation.
"""

import math

import mpmath
import numpy as np
import pytest
import scipy.special

from periwave.errors import DomainError, NonConvergenceError
from periwave.specfun import (
    EULER_GAMMA,
    SeriesControl,
    digamma,
    hyp2f3,
    hyp2f3_series,
    ln_gamma,
    pochhammer,
    recip_gamma,
)

mpmath.mp.dps = 50


def _digamma_series_oracle(x: float, terms: int = 200000) -> float:
    # psi(x) = -gamma + sum_{k>=0} (1/(k+1) - 1/(k+x)); the tail of the
    # partial sum is (x-1)/(N+1/2) + O(1/N^2)
    ks = np.arange(terms, dtype=float)
    partial = np.sum(1.0 / (ks + 1.0) - 1.0 / (ks + x))
    return float(partial - EULER_GAMMA + (x - 1.0) / (terms + 0.5))


class TestLnGamma:
    def test_at_one(self):
        assert ln_gamma(1.0) == pytest.approx(0.0, abs=1e-14)

    def test_factorial_value(self):
        assert ln_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-13)

    def test_half_integer(self):
        # Gamma(3/2) = Gamma(1/2)/2 = sqrt(pi)/2
        assert ln_gamma(1.5) == pytest.approx(math.log(math.sqrt(math.pi) / 2.0), abs=1e-13)

    def test_accuracy_sweep(self):
        # stated contract: relative error <= 1e-13 on [1e-3, 1e3]; measured
        # against scipy with |ln Gamma| floored at 1 since ln Gamma
        # vanishes at x = 1 and x = 2
        for x in np.logspace(-3, 3, 300):
            ref = scipy.special.gammaln(x)
            assert abs(ln_gamma(float(x)) - ref) <= 1e-13 * max(1.0, abs(ref))

    def test_factorial_identity_grid(self):
        # exp(ln_gamma(x+1)) = x exp(ln_gamma(x)), relative 1e-12
        for x in np.logspace(math.log10(0.1), 2, 60):
            lhs = math.exp(ln_gamma(float(x) + 1.0))
            rhs = float(x) * math.exp(ln_gamma(float(x)))
            assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_duplication_identity(self):
        # Gamma(2x) = Gamma(x) Gamma(x+1/2) 2^(2x-1) / sqrt(pi)
        for x in (0.3, 1.0, 2.7, 10.0, 40.0):
            lhs = ln_gamma(2 * x)
            rhs = ln_gamma(x) + ln_gamma(x + 0.5) + (2 * x - 1) * math.log(2.0) \
                - 0.5 * math.log(math.pi)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            ln_gamma(x)


class TestDigamma:
    def test_at_one(self):
        assert digamma(1.0) == pytest.approx(-EULER_GAMMA, abs=1e-13)
        assert digamma(1.0) == pytest.approx(_digamma_series_oracle(1.0), abs=1e-9)

    def test_at_two_via_recurrence(self):
        # psi(2) = psi(1) + 1
        assert digamma(2.0) == pytest.approx(1.0 - EULER_GAMMA, abs=1e-13)

    def test_at_half(self):
        assert digamma(0.5) == pytest.approx(-EULER_GAMMA - 2.0 * math.log(2.0), abs=1e-13)
        assert digamma(0.5) == pytest.approx(_digamma_series_oracle(0.5), abs=1e-9)

    def test_accuracy_sweep(self):
        # stated contract: absolute error <= 1e-12 on [1e-2, 1e3]
        for x in np.logspace(-2, 3, 300):
            assert abs(digamma(float(x)) - scipy.special.digamma(x)) <= 1e-12

    def test_recurrence_property(self):
        for x in (0.03, 0.7, 3.2, 55.0):
            assert digamma(x + 1.0) == pytest.approx(digamma(x) + 1.0 / x, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            digamma(0.0)
        with pytest.raises(DomainError):
            digamma(-3.0)


class TestPochhammer:
    def test_empty_product(self):
        assert pochhammer(3.0, 0) == 1.0

    def test_factorial(self):
        assert pochhammer(1.0, 4) == 24.0

    def test_zero_factor(self):
        assert pochhammer(0.0, 3) == 0.0

    def test_recurrence_property(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            a = float(rng.uniform(-5, 5))
            k = int(rng.integers(0, 12))
            assert pochhammer(a, k + 1) == pytest.approx(pochhammer(a, k) * (a + k), rel=1e-12, abs=1e-12)

    def test_negative_k(self):
        with pytest.raises(DomainError):
            pochhammer(1.0, -1)


class TestRecipGamma:
    def test_poles_are_exact_zeros(self):
        for x in (0.0, -1.0, -2.0, -7.0):
            assert recip_gamma(x) == 0.0

    def test_matches_mpmath(self):
        for x in (-3.3, -0.5, 0.25, 1.0, 6.5):
            ref = float(1.0 / mpmath.gamma(x))
            assert recip_gamma(x) == pytest.approx(ref, rel=1e-12, abs=1e-15)


class TestHyp2F3:
    def test_z_zero(self):
        assert hyp2f3(1.0, 2.0, 3.0, 4.0, 5.0, 0.0) == 1.0

    def test_vanishing_numerator_parameter(self):
        assert hyp2f3(1.0, 0.0, 2.0, 1.5, 2.5, -7.3) == 1.0

    def test_negative_integer_numerator_truncates(self):
        # (-1)_k vanishes from k = 2, so the series is 1 + a1/(b1 b2 b3) z... cut
        value = hyp2f3(1.0, -1.0, 2.0, 2.0, 1.5, 0.8)
        expected = 1.0 + (1.0 * -1.0) / (2.0 * 2.0 * 1.5) * 0.8
        assert value == pytest.approx(expected, rel=1e-14)

    def test_against_high_precision_oracle(self):
        cases = [
            (1.0, 1.0, 2.0, 2.0, 1.5, -1.0),
            (1.0, 0.5, 2.0, 1.5, 2.5, -0.25),
            (1.0, 1.5, 2.0, 1.5, 2.5, -25.0),
            (1.0, -0.75, 2.0, 2.5, 1.25, -100.0),
            (0.5, 2.5, 1.5, 3.0, 4.0, 3.0),
        ]
        for a1, a2, b1, b2, b3, z in cases:
            ref = float(mpmath.hyper([a1, a2], [b1, b2, b3], z))
            assert hyp2f3(a1, a2, b1, b2, b3, z) == pytest.approx(ref, rel=1e-10)

    @pytest.mark.parametrize("bad", [0.0, -1.0, -4.0])
    def test_invalid_lower_parameter(self, bad):
        with pytest.raises(DomainError):
            hyp2f3(1.0, 1.0, bad, 2.0, 3.0, 0.5)

    def test_non_convergence_carries_state(self):
        ctrl = SeriesControl(rel_tol=1e-14, max_terms=5, consecutive_small=3)
        with pytest.raises(NonConvergenceError) as excinfo:
            hyp2f3(1.0, 1.5, 2.0, 1.5, 2.5, -50.0, ctrl)
        assert math.isfinite(excinfo.value.partial)
        assert math.isfinite(excinfo.value.last_term)

    def test_partial_sum_bracketing_once_alternating(self):
        # multiplier-style parameters, z < 0: once the terms alternate in
        # sign with decreasing magnitude the limit sits between any two
        # consecutive partial sums
        for n, beta, z in [(1, 0.0, -1.0), (2, 1.0, -9.0), (3, 2.5, -4.0)]:
            a1, a2 = 1.0, (n + 2 - beta) / 2.0
            b1, b2, b3 = 2.0, (n + 2) / 2.0, (n + 4 - beta) / 2.0
            value = hyp2f3(a1, a2, b1, b2, b3, z)
            term, partials = 1.0, [1.0]
            for k in range(200):
                term *= (a1 + k) * (a2 + k) / ((b1 + k) * (b2 + k) * (b3 + k)) * z / (k + 1)
                partials.append(partials[-1] + term)
            diffs = np.diff(partials)
            # find where strict alternation with decaying magnitude sets in
            # (terms underflow to exactly zero once converged, stop there)
            start = None
            for i in range(len(diffs) - 3):
                if diffs[i + 1] == 0.0:
                    break
                if diffs[i] * diffs[i + 1] < 0 and abs(diffs[i + 1]) < abs(diffs[i]):
                    start = i
                    break
            assert start is not None
            checked = 0
            noise = 8 * np.finfo(float).eps * abs(value)
            for i in range(start, len(diffs)):
                if abs(diffs[i]) <= noise:  # below rounding, bracketing is moot
                    break
                lo, hi = sorted((partials[i], partials[i + 1]))
                assert lo <= value <= hi
                checked += 1
            assert checked >= 5

    def test_control_validation(self):
        with pytest.raises(DomainError):
            SeriesControl(rel_tol=0.0)
        with pytest.raises(DomainError):
            SeriesControl(max_terms=0)
        with pytest.raises(DomainError):
            SeriesControl(consecutive_small=0)

    def test_cancellation_flag_at_large_argument(self):
        # multiplier-style parameters at large |z| lose ~10 digits; the
        # flag must fire so callers can reroute
        res = hyp2f3_series(1.0, 0.5, 2.0, 1.5, 2.5, -3000.0)
        assert res.cancellation_degraded
        res_small = hyp2f3_series(1.0, 0.5, 2.0, 1.5, 2.5, -4.0)
        assert not res_small.cancellation_degraded
