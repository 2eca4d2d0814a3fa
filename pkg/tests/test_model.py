import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bscontrol import (
    MarketParams,
    PhysicalPoint,
    HeatPoint,
    derive_constants,
    from_heat,
    heat_value_to_price,
    to_heat,
)


class TestDeriveConstants:
    def test_study_configuration(self):
        c = derive_constants(MarketParams(r=0.06, sigma=0.3, strike=100.0, maturity=1.0))
        assert c.k == pytest.approx(4.0 / 3.0, rel=1e-15)
        assert c.alpha == pytest.approx(-1.0 / 6.0, rel=1e-15)
        assert c.beta == pytest.approx(-49.0 / 36.0, rel=1e-15)

    def test_zero_rate(self):
        c = derive_constants(MarketParams(r=0.0, sigma=1.0, strike=1.0, maturity=1.0))
        assert c.k == 0.0
        assert c.alpha == 0.5
        assert c.beta == -0.25

    def test_beta_forms_agree(self):
        c = derive_constants(MarketParams(r=0.05, sigma=0.2, strike=1.0, maturity=1.0))
        assert c.k == pytest.approx(2.5, rel=1e-15)
        other = c.alpha**2 + (c.k - 1.0) * c.alpha - c.k
        assert abs(c.beta - other) <= 1e-12

    def test_beta_forms_agree_bulk(self):
        rng = np.random.default_rng(11)
        for _ in range(10_000):
            r = float(rng.uniform(0.0, 0.2))
            sigma = float(rng.uniform(0.05, 1.0))
            c = derive_constants(MarketParams(r=r, sigma=sigma, strike=1.0, maturity=1.0))
            other = c.alpha**2 + (c.k - 1.0) * c.alpha - c.k
            assert abs(c.beta - other) <= 1e-12


class TestValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(r=0.05, sigma=0.0, strike=100.0, maturity=1.0),
            dict(r=0.05, sigma=-0.1, strike=100.0, maturity=1.0),
            dict(r=0.05, sigma=0.2, strike=0.0, maturity=1.0),
            dict(r=0.05, sigma=0.2, strike=100.0, maturity=0.0),
            dict(r=-0.01, sigma=0.2, strike=100.0, maturity=1.0),
            dict(r=0.05, sigma=0.2, strike=100.0, maturity=1.0, day_count=0.0),
        ],
    )
    def test_bad_market_params(self, kwargs):
        with pytest.raises(ValueError):
            MarketParams(**kwargs)

    def test_bad_physical_point(self):
        with pytest.raises(ValueError):
            PhysicalPoint(S=0.0, t=0.1)
        with pytest.raises(ValueError):
            PhysicalPoint(S=-5.0, t=0.1)

    def test_time_beyond_maturity(self, market):
        with pytest.raises(ValueError):
            to_heat(PhysicalPoint(S=100.0, t=market.maturity + 0.01), market)


class TestTransforms:
    def test_expiry_at_the_money(self, market):
        h = to_heat(PhysicalPoint(S=market.strike, t=market.maturity), market)
        assert h.x == 0.0
        assert h.tau == 0.0

    def test_tau_at_start(self, market):
        h = to_heat(PhysicalPoint(S=market.strike, t=0.0), market)
        assert h.tau == pytest.approx(0.045 * 60.0 / 365.0, rel=1e-12)
        assert h.tau == pytest.approx(0.00739726, abs=1e-8)

    def test_log_moneyness(self, market):
        h = to_heat(PhysicalPoint(S=200.0, t=0.1), market)
        assert h.x == pytest.approx(math.log(2.0), rel=1e-15)

    def test_from_heat_identity(self, market):
        p = from_heat(HeatPoint(x=0.0, tau=0.0), market)
        assert p.S == market.strike
        assert p.t == market.maturity

    def test_round_trip_example(self, market):
        p = PhysicalPoint(S=137.5, t=0.1)
        q = from_heat(to_heat(p, market), market)
        assert q.S == pytest.approx(p.S, rel=1e-12)
        assert q.t == pytest.approx(p.t, abs=1e-12)

    def test_full_tau_maps_to_start(self, market):
        p = from_heat(HeatPoint(x=math.log(2.0), tau=market.tau_max), market)
        assert p.S == pytest.approx(2.0 * market.strike, rel=1e-12)
        assert p.t == pytest.approx(0.0, abs=1e-15)

    @given(
        st.floats(1e-3, 1e5),
        st.floats(0.0, 1.0),
    )
    def test_round_trip_property(self, s, t_frac):
        market = MarketParams.from_days(0.06, 0.3, 100.0, 60.0)
        p = PhysicalPoint(S=s, t=t_frac * market.maturity)
        q = from_heat(to_heat(p, market), market)
        assert q.S == pytest.approx(p.S, rel=1e-12)
        assert q.t == pytest.approx(p.t, abs=1e-12)

    def test_tau_out_of_range(self, market):
        with pytest.raises(ValueError):
            from_heat(HeatPoint(x=0.0, tau=market.tau_max * 1.5), market)


class TestBackTransform:
    def test_zero_value(self, market):
        assert heat_value_to_price(HeatPoint(x=0.0, tau=0.0), 0.0, market) == 0.0

    def test_payoff_identity_at_ln2(self, market):
        c = derive_constants(market)
        x = math.log(2.0)
        u = math.exp(0.5 * (c.k + 1.0) * x) - math.exp(0.5 * (c.k - 1.0) * x)
        price = heat_value_to_price(HeatPoint(x=x, tau=0.0), u, market)
        assert price == pytest.approx(market.strike, rel=1e-14)

    def test_payoff_consistency_across_moneyness(self, market):
        # e^(alpha x) (e^((k+1)x/2) - e^((k-1)x/2)) == e^x - 1
        c = derive_constants(market)
        for x in np.linspace(0.01, 3.0, 120):
            x = float(x)
            u = math.exp(0.5 * (c.k + 1.0) * x) - math.exp(0.5 * (c.k - 1.0) * x)
            price = heat_value_to_price(HeatPoint(x=x, tau=0.0), u, market)
            s = market.strike * math.exp(x)
            assert price == pytest.approx(s - market.strike, rel=1e-10)

    def test_full_pipeline_price(self, market):
        # frozen against the independent closed-form oracle
        from bscontrol import call_price

        price = call_price(PhysicalPoint(S=100.0, t=30.0 / 365.0), market)
        assert price == pytest.approx(3.673289629955674, rel=1e-12)
        assert price == pytest.approx(3.68, abs=0.01)
