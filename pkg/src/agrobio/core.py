"""Shared state types, parameters, random streams and population setup.

Farmers are stored as a struct of numpy arrays (:class:`Population`) so that
every per-farmer rule is a vectorised expression. :class:`FarmerState` is a
read-only view of one row, handy in tests and for inspection.
"""
from __future__ import annotations

import dataclasses
import zlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

EXIT_THRESHOLD_HA = 0.1
SIZE_CLASS_EDGES = (20.0, 100.0)  # small < 20 ha <= medium <= 100 ha < large


class ConfigurationError(ValueError):
    """Raised for inconsistent parameters or an unusable initial population."""


@dataclass(frozen=True)
class ModelParams:
    """Model constants. Defaults are the reference calibration for France.

    Monetary values in euro, land in hectares, yields in tonnes per hectare,
    pesticide in kg per hectare, rates per year.
    """

    n0: int = 300_000
    l0_total: float = 1e7
    p_bar0: float = 5.0
    y_bar0: float = 7.0
    pi0: float = 0.3
    r0: float = 0.05
    demand: float = 7e7
    r_eps: float = 0.1
    mu: float = 0.9
    a: float = 0.5
    y_max: float = 8.5
    p_ref_pesticide: float = 10.0
    xi_std: float = 0.05
    alpha: float = 0.08
    p_pesticide: float = 10.0
    c_op: float = 500.0
    c_nonop: float = 600.0
    b: float = 0.9
    s_total: float = 5e9
    eta: float = 0.15
    profit_ref: float = 1000.0
    upsilon_max: float = 0.1
    beta: float = 0.45
    r_ref: float = 0.05
    gamma: float = 2.0
    lambda_: float = 0.2
    k: float = 0.0
    eps_floor: float = 1e-6
    init_noise_std: float = 0.1
    start_year: int = 1990
    end_year: int = 2075
    # Use the rationing ratio exactly as printed (demand / available); this
    # over-allocates land under scarcity and is only meant for comparisons.
    strict_rationing: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        positive = (
            "n0", "l0_total", "p_bar0", "y_bar0", "pi0", "r_eps", "y_max",
            "p_ref_pesticide", "p_pesticide", "c_op", "c_nonop", "s_total",
            "profit_ref", "upsilon_max", "beta", "r_ref", "eps_floor",
        )
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be strictly positive, got {getattr(self, name)!r}")
        for name in ("a", "k", "xi_std", "init_noise_std", "gamma", "lambda_", "demand"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be non-negative")
        if not 0.0 <= self.mu <= 1.0:
            raise ConfigurationError("mu must lie in [0, 1]")
        if not 0.0 <= self.eta <= 1.0:
            raise ConfigurationError("eta must lie in [0, 1]")
        if not 0.0 < self.b <= 1.0:
            raise ConfigurationError("b must lie in (0, 1]")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError("alpha must lie in (0, 1)")
        if not 0.0 < self.pi0 < 1.0:
            raise ConfigurationError("pi0 must lie in (0, 1)")
        if not 0.0 <= self.k <= 1.0:
            raise ConfigurationError("k must lie in [0, 1]")
        if self.start_year >= self.end_year:
            raise ConfigurationError("start_year must precede end_year")

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def desk_scale(self, factor: float = 0.1) -> "ModelParams":
        """Shrink farmer count, land and subsidy budget by a common factor."""
        return self.replace(
            n0=max(1, int(round(self.n0 * factor))),
            l0_total=self.l0_total * factor,
            s_total=self.s_total * factor,
            demand=self.demand * factor,
        )

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.start_year, self.end_year + 1)


@dataclass(frozen=True)
class FarmerState:
    id: int
    land: float
    pesticide: float
    efficiency: float
    yield_target: float
    realized_yield: float
    profit: float
    roi: float
    active: bool


@dataclass
class Population:
    """All farmers as parallel arrays indexed by farmer id."""

    land: np.ndarray
    pesticide: np.ndarray
    efficiency: np.ndarray
    yield_target: np.ndarray
    realized_yield: np.ndarray
    profit: np.ndarray
    cost: np.ndarray
    roi: np.ndarray
    active: np.ndarray

    @classmethod
    def from_arrays(cls, land, pesticide, efficiency, yield_target, realized_yield=None) -> "Population":
        land = np.asarray(land, dtype=float).copy()
        n = land.size
        yield_target = np.asarray(yield_target, dtype=float).copy()
        return cls(
            land=land,
            pesticide=np.asarray(pesticide, dtype=float).copy(),
            efficiency=np.asarray(efficiency, dtype=float).copy(),
            yield_target=yield_target,
            realized_yield=(yield_target.copy() if realized_yield is None
                            else np.asarray(realized_yield, dtype=float).copy()),
            profit=np.zeros(n),
            cost=np.zeros(n),
            roi=np.zeros(n),
            active=land > 0,
        )

    def __len__(self) -> int:
        return self.land.size

    @property
    def n_active(self) -> int:
        return int(np.count_nonzero(self.active))

    @property
    def total_land(self) -> float:
        return float(self.land[self.active].sum())

    def farmer(self, i: int) -> FarmerState:
        return FarmerState(
            id=int(i),
            land=float(self.land[i]),
            pesticide=float(self.pesticide[i]),
            efficiency=float(self.efficiency[i]),
            yield_target=float(self.yield_target[i]),
            realized_yield=float(self.realized_yield[i]),
            profit=float(self.profit[i]),
            roi=float(self.roi[i]),
            active=bool(self.active[i]),
        )

    def copy(self) -> "Population":
        return Population(**{f.name: getattr(self, f.name).copy() for f in dataclasses.fields(self)})


@dataclass(frozen=True)
class MarketState:
    price: float
    prev_price: float
    demand: float
    total_production: float = 0.0
    leftover_land: float = 0.0
    initial_price: float = 0.0
    floor_hits: int = 0

    def __post_init__(self):
        if not self.price > 0:
            raise ValueError("price must be positive")
        if self.leftover_land < 0:
            raise ValueError("leftover land cannot be negative")


@dataclass(frozen=True)
class EcologyState:
    """Biodiversity, pest exposure and carrying capacity plus frozen baselines.

    ``pagg0`` is the initial land-weighted aggregate of ``P * e**k`` used by
    the carrying-capacity update; it equals ``pbar0_weighted`` when k = 0.
    """

    eps: float
    pest: float
    carrying: float
    eps0: float
    lbar0: float
    pbar0_weighted: float
    pagg0: float


class RandomStream:
    """Named, mutually independent random generators derived from one seed.

    Each substream gets its own ``SeedSequence`` child keyed by a fixed
    index, so drawing from one never shifts another.
    """

    NAMES = ("xi", "zeta", "psi", "adoption", "upsilon", "land")

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._generators: dict[str, np.random.Generator] = {}

    def __getitem__(self, name: str) -> np.random.Generator:
        if name not in self._generators:
            if name in self.NAMES:
                key = self.NAMES.index(name)
            else:
                key = 1000 + zlib.crc32(name.encode())
            seq = np.random.SeedSequence(entropy=self.seed & (2**64 - 1), spawn_key=(key,))
            self._generators[name] = np.random.Generator(np.random.PCG64(seq))
        return self._generators[name]


@dataclass(frozen=True)
class SizeClass:
    low: float
    high: float
    count: float
    total_land: float | None = None


def validate_histogram(histogram: Sequence[SizeClass]) -> None:
    if not histogram:
        raise ConfigurationError("empty size histogram")
    total = sum(c.count for c in histogram)
    if not total > 0:
        raise ConfigurationError("size histogram counts must sum to a positive number")
    ordered = sorted(histogram, key=lambda c: c.low)
    for c in ordered:
        if c.count < 0 or not 0 < c.low < c.high:
            raise ConfigurationError(f"bad size class [{c.low}, {c.high}) with count {c.count}")
    for lo, hi in zip(ordered, ordered[1:]):
        if hi.low < lo.high:
            raise ConfigurationError("size classes overlap")


def _positive_gaussian_factor(rng: np.random.Generator, n: int, std: float,
                              low: float = 0.0, high: float = np.inf) -> np.ndarray:
    """Draw ``1 + N(0, std)`` redrawing any value outside ``(low, high)``."""
    factor = 1.0 + rng.normal(0.0, std, n)
    bad = (factor <= low) | (factor >= high)
    while bad.any():
        factor[bad] = 1.0 + rng.normal(0.0, std, int(bad.sum()))
        bad = (factor <= low) | (factor >= high)
    return factor


def sample_land(histogram: Sequence[SizeClass], n: int, total: float,
                rng: np.random.Generator) -> np.ndarray:
    """Sample farm sizes class-proportionally, uniform within class, rescaled to ``total``."""
    validate_histogram(histogram)
    counts = np.array([c.count for c in histogram], dtype=float)
    lows = np.array([c.low for c in histogram])
    highs = np.array([c.high for c in histogram])
    cls = rng.choice(len(histogram), size=n, p=counts / counts.sum())
    land = lows[cls] + (highs[cls] - lows[cls]) * rng.random(n)
    return land * (total / land.sum())


def invert_efficiency(y, pesticide, params: ModelParams, pest: float | None = None):
    """Efficiency that reproduces yield ``y`` at pesticide rate ``pesticide`` with no noise."""
    pest = params.pi0 if pest is None else pest
    return -(params.p_ref_pesticide / np.asarray(pesticide)) * np.log((1.0 - np.asarray(y) / params.y_max) / pest)


def solve_initial_price(land, y0, cost, params: ModelParams) -> float:
    """Price at which the mean farmer ROI equals ``params.r0``.

    ROI is ``(1 - eta) * (p * L * y - C + L / L_tot * S) / C`` and is affine in
    the price, so the mean over farmers has a single root.
    """
    land = np.asarray(land, dtype=float)
    subsidy = land / land.sum() * params.s_total
    slope = np.mean(land * y0 / cost)
    offset = np.mean(subsidy / cost) - 1.0
    price = (params.r0 / (1.0 - params.eta) - offset) / slope
    if not price > 0:
        raise ConfigurationError(f"initial price solution is non-positive ({price:.4g})")
    return float(price)


def weighted_aggregate(land, pesticide, efficiency, k: float) -> float:
    total = land.sum()
    if not total > 0:
        raise ZeroDivisionError("no active land: total sector collapse")
    weights = pesticide if k == 0 else pesticide * efficiency ** k
    return float((land * weights).sum() / total)


def initialize_population(params: ModelParams, size_histogram: Iterable[SizeClass],
                          stream: RandomStream) -> tuple[Population, MarketState, EcologyState]:
    """Build the starting population, goods market and ecology for ``params.start_year``.

    Farm sizes come from ``size_histogram``; pesticide rates and yields are
    Gaussian perturbations of the sector means, redrawn whenever they would
    leave the range where the production function can be inverted to a
    positive efficiency. Demand is set to the resulting total production.
    """
    histogram = list(size_histogram)
    n = params.n0
    land = sample_land(histogram, n, params.l0_total, stream["land"])
    pesticide = params.p_bar0 * _positive_gaussian_factor(stream["zeta"], n, params.init_noise_std)
    # yield must sit strictly between the unprotected yield and y_max
    y_low = params.y_max * (1.0 - params.pi0) / params.y_bar0
    y_high = params.y_max / params.y_bar0
    y0 = params.y_bar0 * _positive_gaussian_factor(stream["psi"], n, params.init_noise_std, y_low, y_high)
    efficiency = invert_efficiency(y0, pesticide, params)

    pop = Population.from_arrays(land, pesticide, efficiency, y0, realized_yield=y0)
    from .economy import production_cost  # local import: economy depends on core

    pop.cost[:] = production_cost(land, pesticide, params)
    price = solve_initial_price(land, y0, pop.cost, params)
    demand = float((land * y0).sum())
    market = MarketState(price=price, prev_price=price, demand=demand,
                         total_production=demand, leftover_land=0.0, initial_price=price)

    lbar0 = float(land.sum() / n)
    pbar0 = weighted_aggregate(land, pesticide, efficiency, 0.0)
    pagg0 = weighted_aggregate(land, pesticide, efficiency, params.k)
    eco = EcologyState(eps=1.0, pest=params.pi0, carrying=1.0, eps0=1.0,
                       lbar0=lbar0, pbar0_weighted=pbar0, pagg0=pagg0)
    return pop, market, eco
