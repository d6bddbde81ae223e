import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from agrobio import economy
from agrobio.core import MarketState, ModelParams
from agrobio.policy import ScenarioConfig, subsidy_terms

from conftest import make_population


def test_yield_limits(params):
    assert economy.yield_per_hectare(1.0, 5.0, 0.0, params) == pytest.approx(8.5)
    assert economy.yield_per_hectare(3.0, 0.0, 0.3, params) == pytest.approx(8.5 * 0.7)
    assert economy.yield_per_hectare(1.0, 5.0, 0.3, params, xi=-2.0) == 0.0


def test_yield_reference_point(params):
    oracle = 8.5 * (1 - 0.3 * math.exp(-0.5))
    y = float(economy.yield_per_hectare(1.0, 5.0, 0.3, params))
    assert y == pytest.approx(oracle, rel=1e-12)
    assert y == pytest.approx(6.953, abs=5e-4)


def test_produce_skips_inactive(params):
    pop = make_population([2.0, 3.0])
    pop.active[1] = False
    out = economy.produce(pop, 0.3, params, np.zeros(2))
    assert out[1] == 0 and pop.realized_yield[1] == 0
    assert out[0] == pytest.approx(2 * pop.realized_yield[0])


@pytest.mark.parametrize("production, factor", [(7e7, 1.0), (6.3e7, 1.008), (7.7e7, 0.992)])
def test_price_update(params, production, factor):
    m = MarketState(price=100.0, prev_price=90.0, demand=7e7, initial_price=100.0)
    new = economy.clear_market(production, m, params)
    assert new.price == pytest.approx(100 * factor, rel=1e-12)
    assert new.prev_price == 100.0 and new.total_production == production


def test_price_floor_instead_of_negative_price(caplog):
    p = ModelParams(alpha=0.9)
    m = MarketState(price=50.0, prev_price=50.0, demand=1.0, initial_price=40.0)
    new = economy.clear_market(3.0, m, p)
    assert new.price == pytest.approx(40.0 * economy.PRICE_FLOOR_FRACTION)
    assert new.floor_hits == 1
    assert "clamped" in caplog.text


def test_cost_of_one_hectare(params):
    assert float(economy.production_cost(1.0, 5.0, params)) == pytest.approx(1 * (50 + 500) + 600)


def test_profit_components(params):
    land = np.array([1.0, 3.0])
    pb = economy.account_profit(land, np.array([5.0, 5.0]), land * 7, 200.0, 4.0, params,
                                per_hectare_pool=400.0, flat_per_farmer=10.0)
    assert pb.subsidy == pytest.approx([110.0, 310.0])
    assert pb.total_cost[0] == pytest.approx(1150.0)
    assert pb.profit == pytest.approx(pb.revenue - pb.total_cost + pb.subsidy)
    assert economy.return_on_investment(pb.profit, pb.total_cost, params) == pytest.approx(
        0.85 * pb.profit / pb.total_cost)


def test_zero_reallocation_reproduces_baseline_subsidy(params):
    land = np.array([1.0, 2.0, 7.0])
    base = subsidy_terms(ScenarioConfig(), params, 2030)
    comb = subsidy_terms(ScenarioConfig(kind="combined", theta=0.0), params, 2030)
    a = economy.account_profit(land, land, land, 1.0, 10.0, params, base.per_hectare_pool,
                               base.flat_per_farmer(3))
    b = economy.account_profit(land, land, land, 1.0, 10.0, params, comb.per_hectare_pool,
                               comb.flat_per_farmer(3))
    assert np.array_equal(a.subsidy, b.subsidy)


def test_reallocated_share_per_farmer(params):
    terms = subsidy_terms(ScenarioConfig(kind="combined", theta=0.003), params, 2022)
    assert terms.flat_per_farmer(230_000) == pytest.approx(0.003 * 5e9 / 230_000)
    assert terms.flat_per_farmer(230_000) == pytest.approx(65, abs=0.5)


def test_adoption_probability(params):
    assert economy.adoption_probability(0.0, params) == 0.0
    assert economy.adoption_probability(-50.0, params) == 0.0
    assert float(economy.adoption_probability(10_000.0, params)) == pytest.approx(1 - math.exp(-1.5))
    assert float(economy.adoption_probability(10_000.0, params)) == pytest.approx(0.777, abs=5e-4)
    assert float(economy.adoption_probability(1e9, params)) == pytest.approx(1.0)


def test_no_profit_no_adoption(params):
    e = np.array([1.0, 1.2])
    out = economy.adopt_technology(e, np.zeros(2), params, np.zeros(2), np.full(2, 0.9))
    assert np.array_equal(out, e)


def test_adoption_gain_bounded(params):
    e = np.ones(1000)
    rng = np.random.default_rng(0)
    out = economy.adopt_technology(e, np.full(1000, 1e6), params, rng.random(1000), rng.random(1000))
    gain = out - e
    assert (gain >= 0).all() and (gain < params.upsilon_max).all()
    assert (gain > 0).mean() > 0.99


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=30), st.integers(0, 2**32 - 1))
def test_efficiency_never_decreases(profits, seed):
    rng = np.random.default_rng(seed)
    n = len(profits)
    e = rng.random(n) + 0.5
    out = economy.adopt_technology(e, np.array(profits), ModelParams(), rng.random(n), rng.random(n))
    assert (out >= e).all()
