import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bscontrol import (
    QuadratureError,
    ScaleSpec,
    ThresholdNotFoundError,
    adaptive_simpson,
    find_lambda0,
    heat_payoff,
    initial_condition_curve,
    l2_consistency,
    scaled_initial_data,
)

K = 4.0 / 3.0
INTERVAL = (0.0, math.log(2.0))


def composite_simpson(f, a, b, panels):
    h = (b - a) / panels
    acc = f(a) + f(b)
    for i in range(1, panels):
        acc += f(a + i * h) * (4.0 if i % 2 else 2.0)
    return acc * h / 3.0


class TestHeatPayoff:
    def test_vanishes_at_zero(self):
        assert heat_payoff(0.0, K) == 0.0

    def test_vanishes_out_of_the_money(self):
        assert heat_payoff(-1.0, K) == 0.0

    def test_value_at_ln2(self):
        # exp(7x/6) - exp(x/6) at x = ln 2 collapses to 2^(1/6)
        v = heat_payoff(math.log(2.0), K)
        assert v == pytest.approx(2.0 ** (7.0 / 6.0) - 2.0 ** (1.0 / 6.0), rel=1e-14)
        assert v == pytest.approx(2.0 ** (1.0 / 6.0), rel=1e-14)

    @given(st.floats(1e-6, 5.0))
    def test_positive_in_the_money(self, x):
        assert heat_payoff(x, K) > 0.0


class TestScaledInitialData:
    def test_zero_at_origin(self):
        spec = ScaleSpec(lam=3.0, n0=4, epsilon=1)
        assert scaled_initial_data(0.0, spec, K) == 0.0

    def test_single_profile_decomposition(self):
        spec = ScaleSpec(lam=10.0, n0=1, epsilon=1)
        x = math.log(2.0)
        expected = heat_payoff(x, K) + 0.1 * heat_payoff(x / 10.0, K)
        assert scaled_initial_data(x, spec, K) == pytest.approx(expected, rel=1e-15)

    @given(st.floats(-2.0, 2.0))
    def test_epsilon_mirror(self, x):
        plus = scaled_initial_data(x, ScaleSpec(lam=4.0, n0=3, epsilon=1), K)
        minus = scaled_initial_data(x, ScaleSpec(lam=4.0, n0=3, epsilon=-1), K)
        base = heat_payoff(x, K)
        assert plus + minus == pytest.approx(2.0 * base, abs=1e-14)

    @given(st.floats(0.05, 3.0), st.floats(1.5, 50.0), st.floats(1.05, 4.0))
    def test_pointwise_decay_in_lambda(self, x, lam, factor):
        # each perturbation summand strictly decreases in lam for x > 0
        j_term = lambda lam_: lam_ ** (-1) * heat_payoff(x / lam_, K)
        assert j_term(lam * factor) < j_term(lam)

    def test_reduces_to_payoff_for_huge_lambda(self):
        spec = ScaleSpec(lam=1e9, n0=1, epsilon=1)
        for x in (0.1, 0.5, 2.0):
            assert scaled_initial_data(x, spec, K) == pytest.approx(
                heat_payoff(x, K), rel=1e-8
            )

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            ScaleSpec(lam=1.0, n0=1, epsilon=1)
        with pytest.raises(ValueError):
            ScaleSpec(lam=2.0, n0=0, epsilon=1)
        with pytest.raises(ValueError):
            ScaleSpec(lam=2.0, n0=1, epsilon=2)


class TestAdaptiveSimpson:
    def test_cubic_is_exact(self):
        assert adaptive_simpson(lambda x: x**3 - 2 * x, 0.0, 2.0, 1e-12) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_sin_against_closed_form(self):
        val = adaptive_simpson(math.sin, 0.0, math.pi, 1e-12)
        assert val == pytest.approx(2.0, rel=1e-12)

    def test_exponential_kinked_integrand(self):
        val = adaptive_simpson(lambda x: heat_payoff(x - 0.5, K), 0.0, 1.0, 1e-11)
        ref = composite_simpson(lambda x: heat_payoff(x - 0.5, K), 0.0, 1.0, 200_000)
        assert val == pytest.approx(ref, abs=1e-9)

    def test_unreachable_tolerance_raises(self):
        step = lambda x: 0.0 if x < 1.0 / math.e else 1.0
        with pytest.raises(QuadratureError):
            adaptive_simpson(step, 0.0, 1.0, 1e-16, max_depth=20)

    def test_bad_tolerance(self):
        with pytest.raises(ValueError):
            adaptive_simpson(math.sin, 0.0, 1.0, 0.0)


class TestL2Consistency:
    def test_pinned_value(self):
        # frozen against a 1e6-panel composite Simpson oracle (1.2136465576713e-05)
        rep = l2_consistency(ScaleSpec(lam=10.0, n0=3, epsilon=1), K, INTERVAL, 1e-12)
        assert rep.deviation_sq == pytest.approx(1.2136465576713e-05, rel=1e-9)

    def test_matches_composite_oracle(self):
        spec = ScaleSpec(lam=5.0, n0=2, epsilon=1)

        def deviation(x):
            return sum(5.0 ** (-j) * heat_payoff(x / 5.0**j, K) for j in (1, 2))

        oracle = composite_simpson(lambda x: deviation(x) ** 2, *INTERVAL, 40_000)
        rep = l2_consistency(spec, K, INTERVAL, 1e-12)
        assert rep.deviation_sq == pytest.approx(oracle, abs=1e-10)

    def test_epsilon_symmetry(self):
        a = l2_consistency(ScaleSpec(10.0, 2, 1), K, INTERVAL, 1e-11)
        b = l2_consistency(ScaleSpec(10.0, 2, -1), K, INTERVAL, 1e-11)
        assert a.deviation_sq == b.deviation_sq

    def test_large_lambda_surrogate(self):
        at_10 = l2_consistency(ScaleSpec(10.0, 1, 1), K, INTERVAL, 1e-14).deviation_sq
        at_1e6 = l2_consistency(ScaleSpec(1e6, 1, 1), K, INTERVAL, 1e-12).deviation_sq
        assert at_1e6 <= 1e-6 * at_10

    def test_decay_ratio_between_10_and_100(self):
        at_10 = l2_consistency(ScaleSpec(10.0, 1, 1), K, INTERVAL, 1e-14).deviation_sq
        at_100 = l2_consistency(ScaleSpec(100.0, 1, 1), K, INTERVAL, 1e-14).deviation_sq
        assert at_100 / at_10 <= 0.15

    @pytest.mark.parametrize("lam", [2.0, 5.0, 10.0, 50.0, 100.0])
    @pytest.mark.parametrize("n0", [1, 3])
    def test_bound_ordering(self, lam, n0):
        quad_tol = 1e-11
        rep = l2_consistency(ScaleSpec(lam, n0, 1), K, INTERVAL, quad_tol)
        assert rep.deviation_sq >= 0.0
        assert rep.deviation_sq <= rep.upper_bound + 2.0 * abs(rep.cross_term) + 10.0 * quad_tol

    def test_interval_validation(self):
        with pytest.raises(ValueError):
            l2_consistency(ScaleSpec(2.0), K, (-1.0, 1.0))
        with pytest.raises(ValueError):
            l2_consistency(ScaleSpec(2.0), K, (0.5, 0.5))


class TestFindLambda0:
    def test_huge_tolerance_returns_lower_edge(self):
        norm0_sq = adaptive_simpson(lambda x: heat_payoff(x, K) ** 2, *INTERVAL, 1e-12)
        lam0 = find_lambda0(10.0 * norm0_sq, 1, K, INTERVAL)
        assert lam0 == pytest.approx(1.01, rel=1e-9)

    def test_study_configuration_threshold_below_ten(self):
        # documented surrogate tolerance: 1% of the payoff's squared norm
        norm0_sq = adaptive_simpson(lambda x: heat_payoff(x, K) ** 2, *INTERVAL, 1e-12)
        lam0 = find_lambda0(0.01 * norm0_sq, 1, K, INTERVAL)
        assert lam0 <= 10.0

    def test_monotone_in_tolerance(self):
        norm0_sq = adaptive_simpson(lambda x: heat_payoff(x, K) ** 2, *INTERVAL, 1e-12)
        loose = find_lambda0(1e-2 * norm0_sq, 1, K, INTERVAL)
        tight = find_lambda0(1e-6 * norm0_sq, 1, K, INTERVAL)
        assert tight > loose

    def test_unreachable_raises(self):
        with pytest.raises(ThresholdNotFoundError):
            find_lambda0(1e-300, 1, K, INTERVAL, lam_max=1e4)


class TestInitialConditionCurve:
    def test_sup_distance_decreases_in_lambda(self, market):
        s_values = np.linspace(0.0, 200.0, 401)
        sups = []
        for lam in (2.0, 5.0, 10.0, 50.0, 100.0):
            c0, c0_lam = initial_condition_curve(
                s_values, ScaleSpec(lam=lam, n0=1, epsilon=1), market, K
            )
            sups.append(np.max(np.abs(c0_lam - c0)))
        assert all(a > b for a, b in zip(sups, sups[1:]))

    def test_zero_price_rows_are_zero(self, market):
        c0, c0_lam = initial_condition_curve(
            [0.0, 50.0], ScaleSpec(lam=2.0), market, K
        )
        assert c0[0] == 0.0 and c0_lam[0] == 0.0
        assert c0[1] == 0.0  # below the strike the base payoff vanishes
        assert c0_lam[1] == 0.0
