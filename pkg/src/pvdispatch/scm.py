"""Self-consumption maximization: store PV surplus, cover deficits from storage."""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    BatteryParams,
    BatteryState,
    DispatchAction,
    ScenarioSeries,
    ValidationError,
    charge_cap,
    discharge_cap,
    make_action,
)


@dataclass(frozen=True)
class ScmConfig:
    deadband_kw: float = 0.1

    def __post_init__(self):
        if not self.deadband_kw >= 0:
            raise ValidationError("deadband_kw must be >= 0")


def scm_decide(
    load_kw: float,
    pv_kw: float,
    state: BatteryState,
    params: BatteryParams,
    cfg: ScmConfig,
    dt_hours: float = 1.0,
) -> DispatchAction:
    """Charge on PV surplus, discharge on deficit, idle inside the deadband.

    The battery never imports from the grid to charge and never exports
    stored energy.
    """
    mismatch = pv_kw - load_kw
    if mismatch > cfg.deadband_kw:
        ch = charge_cap(load_kw, pv_kw, state.energy_kwh, params, dt_hours)
        return make_action(load_kw, pv_kw, ch, 0.0)
    if -mismatch > cfg.deadband_kw:
        dc = discharge_cap(load_kw, pv_kw, state.energy_kwh, params, dt_hours)
        return make_action(load_kw, pv_kw, 0.0, dc)
    return make_action(load_kw, pv_kw)


class ScmController:
    def __init__(self, cfg: ScmConfig | None = None):
        self.cfg = cfg or ScmConfig()
        self.name = f"SCM(dP={self.cfg.deadband_kw:g})"

    def reset(self, scenario: ScenarioSeries, params: BatteryParams, rng=None) -> None:
        self._load = scenario.load_kw.tolist()
        self._pv = scenario.pv_kw.tolist()
        self._dt = scenario.dt_hours
        self._params = params

    def decide(self, t: int, state: BatteryState) -> DispatchAction:
        return scm_decide(self._load[t], self._pv[t], state, self._params, self.cfg, self._dt)
