"""Two structural variants against the baseline.

No pest feedback: pest exposure ignores biodiversity (a = 0) and farms
invest less in technology (eta = 0.02).
Efficiency-weighted pesticide: pesticide counts against biodiversity in
proportion to application efficiency (k = 1), with mu refitted.
"""
import numpy as np

from agrobio import calibration as cal
from agrobio.core import ModelParams
from agrobio.engine import run_scenario
from agrobio.policy import ScenarioConfig
from agrobio.reference import default_reference_dir, load_reference_data

params = ModelParams().desk_scale()
seeds = range(5)
reference, _ = load_reference_data(default_reference_dir())

base = run_scenario(params, ScenarioConfig(), seeds)
no_feedback = run_scenario(params, ScenarioConfig(variant_a=0.0, eta_override=0.02), seeds)
mu, _ = cal.reestimate("mu", np.round(np.arange(0.05, 0.951, 0.05), 2), params.replace(k=1.0),
                       reference, seeds=seeds)
weighted = run_scenario(params, ScenarioConfig(variant_k=1.0, mu_override=mu), seeds)

print(f"refitted mu for k = 1: {mu}")
print(f"{'year':>6s}{'baseline':>10s}{'a=0':>10s}{'k=1':>10s}   mean farm size")
for year in (1990, 2000, 2010, 2021, 2030, 2040, 2050, 2075):
    print(f"{year:6d}" + "".join(f"{r.at('eps', year):10.3f}" for r in (base, no_feedback, weighted))
          + "   " + " / ".join(f"{r.at('mean_farm_size', year):.0f}" for r in (base, no_feedback, weighted)))
