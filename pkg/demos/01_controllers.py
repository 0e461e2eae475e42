"""Cost and decision runtime of the three controllers on a synthetic winter month.

The month has 720 hourly intervals with a building-scale load, a weak PV
profile and a day-ahead price curve with morning and evening peaks.
The stochastic controller is averaged over 20 seeds; SCM and MPC are
deterministic and run once.
"""

from pvdispatch import BatteryParams, IdleController, MpcController, ScmController, StochasticController
from pvdispatch import run_comparison
from pvdispatch.data import generate_synthetic
from pvdispatch.report import format_table

month = generate_synthetic(days=30, seed=1, month=1)
params = BatteryParams()
print(f"{len(month)} intervals, load {month.load_kw.sum():.0f} kWh, PV {month.pv_kw.sum():.0f} kWh\n")

result = run_comparison(
    month,
    [IdleController(), ScmController(), StochasticController(), MpcController()],
    params,
    seeds=range(20),
    keep_reports=False,
)
rows = [(m.method, f"{m.mean_cost:.2f}", f"{m.std_cost:.2f}", f"{m.mean_runtime * 1e3:.2f}") for m in result.methods]
print(format_table(("method", "cost", "std", "runtime_ms"), rows))

mpc, prop, scm = (result[name] for name in ("MPC(T=24)", "Proposed", "SCM(dP=0.1)"))
print(f"proposed vs SCM: {100 * (prop.mean_cost - scm.mean_cost) / scm.mean_cost:+.2f}%")
print(f"proposed vs MPC: {100 * (prop.mean_cost - mpc.mean_cost) / mpc.mean_cost:+.2f}%")
print(f"MPC needs {mpc.mean_runtime / prop.mean_runtime:.0f}x the decision time of the proposed controller")
