"""Yearly simulation loop, Monte Carlo replicas and per-year aggregate frames."""
from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import behavior, ecology, economy, land_market
from .core import (SIZE_CLASS_EDGES, EcologyState, MarketState, ModelParams, Population,
                   RandomStream, SizeClass, initialize_population)
from .policy import ScenarioConfig, pesticide_cap, subsidy_terms

log = logging.getLogger(__name__)


class SectorCollapse(RuntimeError):
    """No active farmer is left; the run cannot continue."""


@dataclass(frozen=True)
class YearFrame:
    """Aggregates for one simulated year.

    State variables (biodiversity, pest exposure, land holdings, pesticide,
    efficiency, farmer count) are the values in force while that year's crop
    is grown; price, production, ROI and subsidies are that year's flows.
    """

    year: int
    eps: float
    pest: float
    carrying: float
    price: float
    total_production: float
    demand: float
    n_active: int
    mean_farm_size: float
    weighted_pesticide_mean: float
    mean_yield: float
    mean_efficiency: float
    mean_efficiency_gain: float
    mean_roi: float
    mean_roi_small: float
    mean_roi_medium: float
    mean_roi_large: float
    leftover_land: float
    land_small: float
    land_medium: float
    land_large: float
    subsidy_per_farmer: float
    subsidy_per_hectare: float


FRAME_FIELDS = tuple(f.name for f in dataclasses.fields(YearFrame))


@dataclass
class SimulationState:
    pop: Population
    market: MarketState
    eco: EcologyState
    year: int
    p_anchor: np.ndarray | None = None


def size_class_masks(land, active):
    small_edge, large_edge = SIZE_CLASS_EDGES
    return (active & (land < small_edge),
            active & (land >= small_edge) & (land <= large_edge),
            active & (land > large_edge))


def _mean_or_nan(values, mask) -> float:
    return float(values[mask].mean()) if mask.any() else float("nan")


def init_state(params: ModelParams, histogram: Sequence[SizeClass], stream: RandomStream) -> SimulationState:
    pop, market, eco = initialize_population(params, histogram, stream)
    pb = economy.account_profit(pop.land, pop.pesticide, pop.land * pop.realized_yield,
                                market.price, pop.land.sum(), params)
    pop.profit[:] = pb.profit
    pop.cost[:] = pb.total_cost
    pop.roi[:] = economy.return_on_investment(pb.profit, pb.total_cost, params)
    return SimulationState(pop, market, eco, params.start_year)


def step_year(state: SimulationState, params: ModelParams, scenario: ScenarioConfig,
              stream: RandomStream) -> YearFrame:
    """Advance ``state`` by one year in place and return that year's frame."""
    pop, eco, year = state.pop, state.eco, state.year
    n_total = len(pop)
    active = pop.active.copy()
    n_active = int(active.sum())
    if n_active == 0:
        raise SectorCollapse(f"no active farmers left in {year}")

    land_total = float(pop.land[active].sum())
    lbar = land_total / n_active
    pbar = ecology.weighted_pesticide_mean(pop.land, pop.pesticide, pop.efficiency, active)
    mean_eff = float(pop.efficiency[active].mean())
    leftover_start = state.market.leftover_land
    classes = size_class_masks(pop.land, active)
    class_land = [float(pop.land[m].sum()) for m in classes]

    # (1) production
    xi = stream["xi"].normal(0.0, params.xi_std, n_total) if params.xi_std > 0 else np.zeros(n_total)
    output = economy.produce(pop, eco.pest, params, xi)
    total_output = float(output[active].sum())

    # (2) goods market and accounting
    market = economy.clear_market(total_output, state.market, params)
    terms = subsidy_terms(scenario, params, year)
    flat = terms.flat_per_farmer(n_active)
    pb = economy.account_profit(pop.land[active], pop.pesticide[active], output[active],
                                market.price, land_total, params, terms.per_hectare_pool, flat)
    pop.profit[active] = pb.profit
    pop.cost[active] = pb.total_cost
    pop.roi[active] = economy.return_on_investment(pb.profit, pb.total_cost, params)

    # (3) technology adoption; draws cover every id so streams stay aligned across scenarios
    u = stream["adoption"].random(n_total)
    gain = stream["upsilon"].random(n_total)
    e_before = pop.efficiency[active]
    pop.efficiency[active] = economy.adopt_technology(e_before, pop.profit[active],
                                                      params, u[active], gain[active])
    eff_gain = float((pop.efficiency[active] - e_before).mean())

    # (4) land market
    settlement = land_market.settle_market(pop, market.leftover_land, params)
    market = dataclasses.replace(market, leftover_land=settlement.leftover)

    # (5) pesticide and yield targets of those still farming
    if scenario.reduces_pesticide and state.p_anchor is None and year + 1 >= scenario.ramp_start_year:
        state.p_anchor = pop.pesticide.copy()
    still = pop.active
    cap = None
    if state.p_anchor is not None:
        cap = pesticide_cap(scenario, state.p_anchor[still], year + 1)
    pop.pesticide[still] = behavior.update_pesticide(pop.pesticide[still], pop.yield_target[still],
                                                     pop.realized_yield[still], params, cap)
    pop.yield_target[still] = behavior.update_yield_target(pop.yield_target[still], market.price,
                                                           market.prev_price, params)

    frame = YearFrame(
        year=year,
        eps=eco.eps,
        pest=eco.pest,
        carrying=eco.carrying,
        price=market.price,
        total_production=total_output,
        demand=market.demand,
        n_active=n_active,
        mean_farm_size=lbar,
        weighted_pesticide_mean=pbar,
        mean_yield=total_output / land_total,
        mean_efficiency=mean_eff,
        mean_efficiency_gain=eff_gain,
        mean_roi=float(pop.roi[active].mean()),
        mean_roi_small=_mean_or_nan(pop.roi, classes[0]),
        mean_roi_medium=_mean_or_nan(pop.roi, classes[1]),
        mean_roi_large=_mean_or_nan(pop.roi, classes[2]),
        leftover_land=leftover_start,
        land_small=class_land[0],
        land_medium=class_land[1],
        land_large=class_land[2],
        subsidy_per_farmer=flat,
        subsidy_per_hectare=terms.per_hectare_pool / land_total,
    )

    # (6) ecology responds to next year's holdings and pesticide rates
    if pop.n_active:
        lbar_next = pop.total_land / pop.n_active
        pagg_next = ecology.weighted_pesticide_mean(pop.land, pop.pesticide, pop.efficiency,
                                                    pop.active, params.k)
        state.eco = ecology.advance(eco, lbar_next, pagg_next, params)
    state.market = market
    state.year = year + 1
    return frame


@dataclass
class Run:
    seed: int
    frames: list[YearFrame]
    collapsed: bool = False

    def series(self) -> dict[str, np.ndarray]:
        return frames_to_series(self.frames)


def frames_to_series(frames: Sequence[YearFrame]) -> dict[str, np.ndarray]:
    return {name: np.array([getattr(f, name) for f in frames], dtype=float) for name in FRAME_FIELDS}


def _default_histogram():
    from .reference import default_size_histogram
    return default_size_histogram()


def run(params: ModelParams, scenario: ScenarioConfig | None = None, seed: int = 0,
        histogram: Sequence[SizeClass] | None = None, end_year: int | None = None) -> Run:
    """Simulate one replica from ``params.start_year`` through ``end_year`` inclusive."""
    scenario = scenario or ScenarioConfig()
    params = scenario.apply(params)
    histogram = _default_histogram() if histogram is None else histogram
    end_year = params.end_year if end_year is None else end_year
    stream = RandomStream(seed)
    state = init_state(params, histogram, stream)
    frames = []
    collapsed = False
    while state.year <= end_year:
        try:
            frames.append(step_year(state, params, scenario, stream))
        except SectorCollapse as exc:
            log.warning("seed %d: %s; run truncated", seed, exc)
            collapsed = True
            break
    return Run(seed, frames, collapsed)


@dataclass
class ScenarioResult:
    scenario: ScenarioConfig
    runs: list[Run]
    years: np.ndarray
    mean: dict[str, np.ndarray] = field(default_factory=dict)
    stderr: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def seeds(self) -> list[int]:
        return [r.seed for r in self.runs]

    @property
    def any_collapsed(self) -> bool:
        return any(r.collapsed for r in self.runs)

    def at(self, name: str, year: int) -> float:
        return float(self.mean[name][np.searchsorted(self.years, year)])


def monte_carlo_summary(runs: Sequence[Run], years: np.ndarray):
    """Mean and standard error per field over replicas (NaN-padded past a collapse)."""
    stacked = {}
    for name in FRAME_FIELDS:
        arr = np.full((len(runs), years.size), np.nan)
        for i, r in enumerate(runs):
            values = [getattr(f, name) for f in r.frames]
            arr[i, :len(values)] = values
        stacked[name] = arr
    mean, stderr = {}, {}
    with np.errstate(invalid="ignore"), _quiet_nan_warnings():
        for name, arr in stacked.items():
            count = np.sum(~np.isnan(arr), axis=0)
            mean[name] = np.nanmean(arr, axis=0) if len(runs) > 1 else arr[0].copy()
            if len(runs) > 1:
                sd = np.nanstd(arr, axis=0, ddof=1)
                stderr[name] = sd / np.sqrt(np.maximum(count, 1))
            else:
                stderr[name] = np.zeros(years.size)
    return mean, stderr


class _quiet_nan_warnings:
    def __enter__(self):
        import warnings
        self._ctx = warnings.catch_warnings()
        self._ctx.__enter__()
        warnings.simplefilter("ignore", RuntimeWarning)

    def __exit__(self, *exc):
        return self._ctx.__exit__(*exc)


def _run_job(args):
    return run(*args)


def run_scenario(params: ModelParams, scenario: ScenarioConfig | None = None,
                 seeds: Sequence[int] = (0,), histogram: Sequence[SizeClass] | None = None,
                 end_year: int | None = None, n_jobs: int = 1) -> ScenarioResult:
    """Run one replica per seed and average them year by year.

    Replicas are independent, so ``n_jobs > 1`` farms them out to worker
    processes; the result does not depend on ``n_jobs``.
    """
    if not seeds:
        raise ValueError("at least one seed is required")
    scenario = scenario or ScenarioConfig()
    histogram = _default_histogram() if histogram is None else list(histogram)
    end_year = params.end_year if end_year is None else end_year
    jobs = [(params, scenario, int(s), histogram, end_year) for s in seeds]
    if n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            runs = list(pool.map(_run_job, jobs))
    else:
        runs = [_run_job(j) for j in jobs]
    years = np.arange(params.start_year, end_year + 1)
    mean, stderr = monte_carlo_summary(runs, years)
    return ScenarioResult(scenario, runs, years, mean, stderr)


SWEEP_FIELDS = ("eps", "price", "mean_farm_size", "n_active", "subsidy_per_farmer", "subsidy_per_hectare")


@dataclass(frozen=True)
class SweepRow:
    """End-year outcomes of the combined policy at one reallocation fraction."""

    theta: float
    year: int
    eps: float
    price: float
    mean_farm_size: float
    n_active: float
    subsidy_per_farmer: float
    subsidy_per_hectare: float
    subsidy_per_farmer_at_start: float


def theta_sweep(params: ModelParams, theta_grid: Sequence[float], seeds: Sequence[int] = (0,),
                base: ScenarioConfig | None = None, histogram: Sequence[SizeClass] | None = None,
                end_year: int | None = None, n_jobs: int = 1) -> list[SweepRow]:
    """Run the combined policy once per reallocation fraction.

    Every grid point reuses the same seeds, so differences between rows
    come from ``theta`` alone.
    """
    base = (base or ScenarioConfig(kind="combined")).replace(kind="combined")
    end_year = params.end_year if end_year is None else end_year
    rows = []
    for theta in theta_grid:
        scenario = base.replace(theta=float(theta))
        res = run_scenario(params, scenario, seeds, histogram, end_year, n_jobs)
        start = min(max(scenario.ramp_start_year, params.start_year), end_year)
        rows.append(SweepRow(float(theta), end_year,
                             *(res.at(name, end_year) for name in SWEEP_FIELDS),
                             res.at("subsidy_per_farmer", start)))
    return rows
