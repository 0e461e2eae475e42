"""The MILP solver against a brute-force dynamic program, then one-shot MPC.

The dynamic program walks a 0.01 kWh energy lattice, so it can only be as
good as the exact MILP or slightly worse.
"""

import numpy as np

from pvdispatch import BatteryParams, MilpProblem, MpcConfig, MpcController, run_simulation
from pvdispatch import solve_dp_oracle, solve_lp_relaxation, solve_milp
from pvdispatch.data import generate_synthetic

params = BatteryParams()

# buy cheap, sell dear: charge 7 kW then discharge what was stored
toy = MilpProblem([0, 0], [0, 0], [0.1, 1.0], [0.05, 0.9], params.e_min_kwh, params)
sol = solve_milp(toy)
print(f"two-interval arbitrage: cost {sol.objective:.4f}, charge {sol.charge_kw}, discharge {sol.discharge_kw}")

rng = np.random.default_rng(0)
gaps = []
for _ in range(50):
    T = int(rng.integers(2, 9))
    sell = rng.uniform(0, 0.5, T)
    prob = MilpProblem(rng.uniform(0, 6, T), rng.uniform(0, 6, T), sell + rng.uniform(0, 0.5, T), sell,
                       float(rng.uniform(params.e_min_kwh, params.e_max_kwh)), params)
    milp = solve_milp(prob).objective
    gaps.append(solve_dp_oracle(prob).objective - milp)
    assert solve_lp_relaxation(prob).fun <= milp + 1e-9
print(f"50 random instances: DP - MILP in [{min(gaps):.4f}, {max(gaps):.4f}]")

two_days = generate_synthetic(days=2, seed=11, month=7)
n = len(two_days)
one_shot = solve_milp(MilpProblem.from_scenario(two_days, 0, n, params.e_init_kwh, params)).objective
realized = run_simulation(two_days, MpcController(MpcConfig(n)), params).total_cost
print(f"{n}-interval scenario: MILP optimum {one_shot:.6f}, MPC over the full length {realized:.6f}")
