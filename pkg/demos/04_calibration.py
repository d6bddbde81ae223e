"""Score parameter sets against the historical fixtures.

A full search uses 256 Sobol points with ten replicas each (tens of
minutes at desk scale); here a handful of points shows the mechanics,
then the calibrated optimum is scored and the sensitivity table printed.
"""
import numpy as np

from agrobio import calibration as cal
from agrobio.core import ModelParams
from agrobio.reference import default_reference_dir, load_reference_data

reference, histogram = load_reference_data(default_reference_dir())
params = ModelParams().desk_scale()

spec = cal.CalibrationSpec(sobol_points=8, replicas_per_point=2)
result = cal.calibrate(spec, reference, params, histogram)
for e in result.evaluations:
    print(f"score {e.score:7.3f}  R2 {e.r2:6.3f}  " + " ".join(f"{k}={v:.3g}" for k, v in e.point.items()))

best = cal.evaluate(cal.OPTIMAL_POINT, params, cal.CalibrationSpec(replicas_per_point=10), reference)
print(f"\noptimum: R2 {best.r2:.3f}, adjusted {best.adjusted_r2:.3f}, "
      f"mean efficiency gain {best.efficiency_gain:.4f} per year")

# one-at-a-time +-50% perturbations, relative change in 2020
table = cal.sensitivity(cal.OPTIMAL_POINT, params, seeds=range(3))
print(f"\n{'':12s}" + "".join(f"{o:>12s}" for o in cal.SENSITIVITY_OUTPUTS))
for name in table.parameters():
    print(f"{name:12s}" + "".join(f"{table.spread(name, o):12.3f}" for o in cal.SENSITIVITY_OUTPUTS))

# refit one parameter after switching on a model variant
mu, scores = cal.reestimate("mu", np.round(np.arange(0.1, 0.95, 0.1), 1), params.replace(k=1.0),
                            reference, seeds=range(3))
print(f"\nmu refit with efficiency-weighted pesticide: {mu}")
