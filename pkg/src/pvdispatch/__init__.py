"""Battery dispatch simulation for hybrid PV/battery/load systems.

Three scheduling policies share one simulation engine:

* ``scm_decide`` - rule-based self-consumption maximization,
* ``MpcController`` - receding-horizon MILP (own simplex + branch and bound),
* ``StochasticController`` - lightweight price-responsive stochastic controller.
"""

from .core import (
    BatteryParams,
    BatteryState,
    BoundsViolation,
    CostLedger,
    DispatchAction,
    ScenarioSeries,
    ValidationError,
    charge_cap,
    discharge_cap,
    interval_cost,
    make_action,
    split_grid,
    step_battery,
    total_cost,
)
from .scm import ScmConfig, ScmController, scm_decide
from .lp import LpResult, NumericalFailure, solve_lp
from .milp import MilpProblem, MilpSolution, solve_dp_oracle, solve_milp, solve_lp_relaxation
from .mpc import MpcConfig, MpcController, mpc_decide
from .stochastic import (
    NormalizedPrices,
    SrrConfig,
    StochasticController,
    modify_buy_prices,
    normalize_prices,
    prepare_prices,
    srr_charge,
    srr_discharge,
    stochastic_decide,
)
from .simulation import (
    ComparisonResult,
    ExternalSignalConfig,
    IdleController,
    SimulationReport,
    SignalSweepRow,
    percent_difference,
    run_comparison,
    run_simulation,
    signal_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BatteryParams",
    "BatteryState",
    "BoundsViolation",
    "ComparisonResult",
    "CostLedger",
    "DispatchAction",
    "ExternalSignalConfig",
    "IdleController",
    "LpResult",
    "MilpProblem",
    "MilpSolution",
    "MpcConfig",
    "MpcController",
    "NormalizedPrices",
    "NumericalFailure",
    "ScenarioSeries",
    "SignalSweepRow",
    "ScmConfig",
    "ScmController",
    "SimulationReport",
    "SrrConfig",
    "ValidationError",
    "StochasticController",
    "charge_cap",
    "discharge_cap",
    "interval_cost",
    "make_action",
    "modify_buy_prices",
    "mpc_decide",
    "normalize_prices",
    "percent_difference",
    "prepare_prices",
    "run_comparison",
    "run_simulation",
    "scm_decide",
    "signal_sweep",
    "solve_dp_oracle",
    "solve_lp",
    "solve_lp_relaxation",
    "solve_milp",
    "split_grid",
    "srr_charge",
    "srr_discharge",
    "step_battery",
    "stochastic_decide",
    "total_cost",
]
