"""Receding-horizon MPC: solve the horizon MILP each interval, apply the first action."""

from __future__ import annotations

from dataclasses import dataclass

from .core import BatteryParams, BatteryState, DispatchAction, ScenarioSeries, ValidationError
from .lp import NumericalFailure
from .milp import MilpProblem, solve_milp


@dataclass(frozen=True)
class MpcConfig:
    horizon: int = 24

    def __post_init__(self):
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ValidationError("horizon must be a positive integer")


def mpc_decide(
    t_now: int,
    scenario: ScenarioSeries,
    state: BatteryState,
    params: BatteryParams,
    cfg: MpcConfig,
) -> DispatchAction:
    """First action of the optimal schedule over ``[t_now, t_now + horizon)``.

    The window shrinks at the end of the data instead of padding it.
    """
    n = len(scenario)
    if not 0 <= t_now < n:
        raise IndexError(f"t_now={t_now} outside scenario of length {n}")
    stop = min(t_now + cfg.horizon, n)
    problem = MilpProblem.from_scenario(scenario, t_now, stop, state.energy_kwh, params)
    sol = solve_milp(problem)
    if not sol.optimal:
        # idle is always feasible, so this is a solver defect
        raise NumericalFailure(f"horizon MILP reported {sol.status} at interval {t_now}")
    return DispatchAction(
        float(sol.charge_kw[0]),
        float(sol.discharge_kw[0]),
        float(sol.grid_buy_kw[0]),
        float(sol.grid_sell_kw[0]),
    )


class MpcController:
    def __init__(self, cfg: MpcConfig | None = None):
        self.cfg = cfg or MpcConfig()
        self.name = f"MPC(T={self.cfg.horizon})"

    def reset(self, scenario: ScenarioSeries, params: BatteryParams, rng=None) -> None:
        self._scenario = scenario
        self._params = params

    def decide(self, t: int, state: BatteryState) -> DispatchAction:
        return mpc_decide(t, self._scenario, state, self._params, self.cfg)
