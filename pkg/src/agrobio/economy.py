"""Production, goods-market clearing, profit accounting and technology adoption."""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass

import numpy as np

from .core import MarketState, ModelParams

log = logging.getLogger(__name__)

PRICE_FLOOR_FRACTION = 1e-6


def yield_per_hectare(efficiency, pesticide, pest, params: ModelParams, xi=0.0):
    """Saturating yield response ``y_max * (1 - pest * exp(-e P / P_ref)) * (1 + xi)``.

    Negative values from extreme noise draws are clamped to zero.
    """
    protection = np.exp(-np.asarray(efficiency) * np.asarray(pesticide) / params.p_ref_pesticide)
    y = params.y_max * (1.0 - pest * protection) * (1.0 + np.asarray(xi))
    return np.maximum(y, 0.0)


def produce(pop, pest: float, params: ModelParams, xi) -> np.ndarray:
    """Update ``pop.realized_yield`` for active farmers and return per-farmer output in tonnes.

    ``xi`` holds one noise value per farmer (inactive rows are ignored).
    """
    y = yield_per_hectare(pop.efficiency, pop.pesticide, pest, params, xi)
    y = np.where(pop.active, y, 0.0)
    pop.realized_yield[:] = y
    return pop.land * y


def clear_market(total_production: float, market: MarketState, params: ModelParams) -> MarketState:
    """One step of the excess-demand price rule."""
    demand = market.demand
    price = market.price * (1.0 + params.alpha * (demand - total_production) / demand)
    floor_hits = market.floor_hits
    if price <= 0:
        price = PRICE_FLOOR_FRACTION * (market.initial_price or market.price)
        floor_hits += 1
        log.warning("price update went non-positive; clamped to %.3g", price)
    return dataclasses.replace(market, price=price, prev_price=market.price,
                               total_production=float(total_production), floor_hits=floor_hits)


def production_cost(land, pesticide, params: ModelParams):
    """Operational, pesticide and scale-dependent non-operational cost."""
    land = np.asarray(land, dtype=float)
    return land * (params.p_pesticide * np.asarray(pesticide) + params.c_op) + land ** params.b * params.c_nonop


@dataclass
class ProfitBreakdown:
    revenue: np.ndarray
    op_costs: np.ndarray
    pesticide_costs: np.ndarray
    nonop_costs: np.ndarray
    subsidy: np.ndarray
    profit: np.ndarray

    @property
    def total_cost(self):
        return self.op_costs + self.pesticide_costs + self.nonop_costs


def account_profit(land, pesticide, output, price: float, total_land: float, params: ModelParams,
                   per_hectare_pool: float | None = None, flat_per_farmer: float = 0.0) -> ProfitBreakdown:
    """Revenue minus costs plus subsidies.

    The land-proportional pool defaults to the full budget ``params.s_total``;
    ``flat_per_farmer`` is added unchanged to every farmer passed in.
    """
    land = np.asarray(land, dtype=float)
    pesticide = np.asarray(pesticide, dtype=float)
    pool = params.s_total if per_hectare_pool is None else per_hectare_pool
    revenue = price * np.asarray(output, dtype=float)
    op = land * params.c_op
    pest_cost = land * params.p_pesticide * pesticide
    nonop = land ** params.b * params.c_nonop
    subsidy = land / total_land * pool + flat_per_farmer
    profit = revenue - (op + pest_cost + nonop) + subsidy
    return ProfitBreakdown(revenue, op, pest_cost, nonop, subsidy, profit)


def return_on_investment(profit, cost, params: ModelParams):
    return (1.0 - params.eta) * np.asarray(profit) / np.asarray(cost)


def adoption_probability(profit, params: ModelParams):
    """Chance that investing ``eta * profit`` raises efficiency; zero for losses."""
    profit = np.asarray(profit, dtype=float)
    return np.where(profit > 0, -np.expm1(-params.eta * np.maximum(profit, 0.0) / params.profit_ref), 0.0)


def adopt_technology(efficiency, profit, params: ModelParams, u, gain_fraction):
    """Return updated efficiencies.

    ``u`` are uniform draws deciding the Bernoulli trials and
    ``gain_fraction`` uniform draws on [0, 1) scaled by ``upsilon_max``.
    """
    success = np.asarray(u) < adoption_probability(profit, params)
    return np.asarray(efficiency) + np.where(success, params.upsilon_max * np.asarray(gain_fraction), 0.0)
