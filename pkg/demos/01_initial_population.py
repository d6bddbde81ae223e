"""Build the starting farm population and look at what comes out.

Run from the repository root:  python3 demos/01_initial_population.py
"""
import numpy as np

from agrobio.core import ModelParams, RandomStream, initialize_population
from agrobio.economy import yield_per_hectare
from agrobio.reference import default_size_histogram

params = ModelParams().desk_scale()  # 30 000 farms on 1e6 ha
histogram = default_size_histogram()

print("size classes of the first census")
for c in histogram:
    print(f"  [{c.low:5.0f}, {c.high:5.0f}) ha  {c.count:8.0f} farms  {c.total_land:12.0f} ha")

pop, market, eco = initialize_population(params, histogram, RandomStream(seed=0))

print()
print(f"farms            {pop.n_active}")
print(f"total land       {pop.total_land:.6g} ha")
print(f"mean farm size   {pop.land.mean():.1f} ha (median {np.median(pop.land):.1f})")
print(f"mean yield       {pop.realized_yield.mean():.3f} t/ha")
print(f"demand           {market.demand:.4g} t (ten times this nationally)")
print(f"initial price    {market.price:.2f} euro/t")
print(f"efficiency       {pop.efficiency.mean():.3f} +- {pop.efficiency.std():.3f}")

# The efficiency is chosen so the production function returns each farm's
# starting yield; plugging it back in closes the loop.
y = yield_per_hectare(pop.efficiency, pop.pesticide, eco.pest, params)
print(f"max |y(e) - y0|  {np.abs(y - pop.realized_yield).max():.2e}")

# Small farms carry proportionally higher non-operational costs.
from agrobio.economy import production_cost

per_ha = production_cost(pop.land, pop.pesticide, params) / pop.land
for lo, hi in [(0, 20), (20, 100), (100, np.inf)]:
    m = (pop.land >= lo) & (pop.land < hi)
    print(f"cost per ha, {lo}-{hi} ha farms: {per_ha[m].mean():7.1f} euro ({m.sum()} farms)")
