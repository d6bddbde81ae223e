"""How much of the per-hectare budget should move to per-farmer payments?

Runs the combined policy over a grid of reallocation fractions and draws
the six end-year panels.
"""
from pathlib import Path

from agrobio import charts, results
from agrobio.core import ModelParams
from agrobio.engine import theta_sweep

out = Path(__file__).parent / "output" / "sweep"
params = ModelParams().desk_scale()
grid = [0.0, 0.0005, 0.001, 0.002, 0.003, 0.005, 0.01]

rows = theta_sweep(params, grid, seeds=range(5))
print(f"{'theta %':>8s}{'eps':>8s}{'farms':>8s}{'size':>8s}{'price':>8s}{'per farmer':>12s}")
for r in rows:
    print(f"{100 * r.theta:8.2f}{r.eps:8.3f}{r.n_active:8.0f}{r.mean_farm_size:8.1f}{r.price:8.2f}"
          f"{r.subsidy_per_farmer:12.1f}")

# the farmer count stops responding once the payment keeps every remaining farm afloat
results.write_results({}, out, sweep=rows)
charts.render_sweep(rows, out / "theta_sweep.svg")
print("written to", out)
