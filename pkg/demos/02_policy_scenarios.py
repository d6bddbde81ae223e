"""Baseline against the three policies, ten replicas each, and the nine-panel chart.

Takes about a minute at desk scale.  Output goes to demos/output/.
"""
from pathlib import Path

from agrobio import charts, results
from agrobio.core import ModelParams
from agrobio.engine import run_scenario
from agrobio.policy import KINDS, ScenarioConfig

out = Path(__file__).parent / "output" / "scenarios"
params = ModelParams().desk_scale()
seeds = range(10)

runs = {}
for kind in KINDS:
    runs[kind] = run_scenario(params, ScenarioConfig(kind=kind), seeds)

print(f"{'':22s}{'eps 2050':>10s}{'eps 2075':>10s}{'farms 2075':>12s}{'size 2075':>11s}{'price 2075':>12s}")
for kind, r in runs.items():
    print(f"{kind:22s}{r.at('eps', 2050):10.3f}{r.at('eps', 2075):10.3f}"
          f"{r.at('n_active', 2075):12.0f}{r.at('mean_farm_size', 2075):11.1f}{r.at('price', 2075):12.2f}")

# Monte Carlo noise is small next to the differences between scenarios
print("largest s.e. of eps:", max(float(r.stderr["eps"].max()) for r in runs.values()))

comb = runs["combined"]
print(f"combined policy pays {comb.at('subsidy_per_farmer', 2022):.0f} euro per farmer in 2022, "
      f"per-hectare payment {comb.at('subsidy_per_hectare', 2022):.1f} vs "
      f"{runs['baseline'].at('subsidy_per_hectare', 2022):.1f} euro/ha under the baseline")

results.write_results(runs, out)
charts.render_scenarios({k: r.mean for k, r in runs.items()}, out / "scenarios.svg")
print("written to", out)
