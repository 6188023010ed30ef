"""A small phase transition from a JSON plan.

Runs ``plan.json`` (noiseless ABP, sweeping the number of measurements)
with two workers, prints the success rate per cell and writes the records
and plot data next to this file.  The same plan runs from the shell with
``tightcs experiment run demos/plan.json --out-dir out``.
"""

import os

from tightcs.experiments import emit_report, load_plan, run_experiment

here = os.path.dirname(os.path.abspath(__file__))
plan = load_plan(os.path.join(here, "plan.json"))
records, agg = run_experiment(plan, workers=2)
for a in agg:
    print(f"m={a.point['m']:3d}  success={a.success_rate:.2f}  median error={a.median_error_l2:.2e}")
out = os.path.join(here, "out")
os.makedirs(out, exist_ok=True)
emit_report(records, agg, "csv", os.path.join(out, "records.csv"))
emit_report(records, agg, "plotdata", os.path.join(out, "success.dat"))
print("wrote", out)
