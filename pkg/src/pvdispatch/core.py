"""Domain types, battery energy dynamics and cost accounting.

Units: power in kW, energy in kWh, prices in currency/kWh, durations in hours.
Sign convention for the grid: ``buy - sell + pv + discharge - charge = load``
with ``buy, sell >= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

BOUNDS_TOL_KWH = 1e-6
RATE_TOL_KW = 1e-9


class ValidationError(ValueError):
    """Input data violates a type invariant."""


class BoundsViolation(RuntimeError):
    """A battery update left the admissible energy band or exceeded a rate."""


@dataclass(frozen=True)
class BatteryParams:
    nominal_capacity_kwh: float = 13.5
    charge_rate_kw: float = 7.0
    discharge_rate_kw: float = 7.0
    eff_charge: float = 0.97
    eff_discharge: float = 1.0
    soc_max: float = 0.9
    soc_min: float = 0.1
    soc_init: float = 0.3

    def __post_init__(self):
        if not self.nominal_capacity_kwh > 0:
            raise ValidationError("nominal_capacity_kwh must be > 0")
        if not (self.charge_rate_kw > 0 and self.discharge_rate_kw > 0):
            raise ValidationError("charge/discharge rates must be > 0")
        if not 0 <= self.soc_min < self.soc_max <= 1:
            raise ValidationError("need 0 <= soc_min < soc_max <= 1")
        if not self.soc_min <= self.soc_init <= self.soc_max:
            raise ValidationError("soc_init must lie in [soc_min, soc_max]")
        if not (0 < self.eff_charge <= 1 and 0 < self.eff_discharge <= 1):
            raise ValidationError("efficiencies must lie in (0, 1]")

    @property
    def e_max_kwh(self) -> float:
        return self.nominal_capacity_kwh * self.soc_max

    @property
    def e_min_kwh(self) -> float:
        return self.nominal_capacity_kwh * self.soc_min

    @property
    def e_init_kwh(self) -> float:
        return self.nominal_capacity_kwh * self.soc_init

    def initial_state(self) -> "BatteryState":
        return BatteryState(self.e_init_kwh)


class BatteryState(NamedTuple):
    energy_kwh: float

    def soc(self, params: BatteryParams) -> float:
        return self.energy_kwh / params.nominal_capacity_kwh


class DispatchAction(NamedTuple):
    """Controller output for one interval (all entries >= 0)."""

    charge_kw: float = 0.0
    discharge_kw: float = 0.0
    grid_buy_kw: float = 0.0
    grid_sell_kw: float = 0.0


def _as_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


@dataclass(frozen=True, eq=False)
class ScenarioSeries:
    """Aligned input series on a uniform time grid."""

    load_kw: np.ndarray
    pv_kw: np.ndarray
    price_buy: np.ndarray
    price_sell: np.ndarray
    dt_hours: float = 1.0

    def __post_init__(self):
        for name in ("load_kw", "pv_kw", "price_buy", "price_sell"):
            arr = _as_array(getattr(self, name), name)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = len(self.load_kw)
        if n < 1:
            raise ValidationError("scenario needs at least one interval")
        if not (len(self.pv_kw) == len(self.price_buy) == len(self.price_sell) == n):
            raise ValidationError("all input series must have equal length")
        if not self.dt_hours > 0:
            raise ValidationError("dt_hours must be > 0")
        for name in ("load_kw", "pv_kw"):
            bad = np.flatnonzero(getattr(self, name) < 0)
            if bad.size:
                raise ValidationError(f"{name} is negative at interval {bad[0]}")
        bad = np.flatnonzero(self.price_sell > self.price_buy)
        if bad.size:
            raise ValidationError(f"price_sell exceeds price_buy at interval {bad[0]}")

    def __len__(self) -> int:
        return len(self.load_kw)

    def window(self, start: int, stop: int) -> "ScenarioSeries":
        return ScenarioSeries(
            self.load_kw[start:stop],
            self.pv_kw[start:stop],
            self.price_buy[start:stop],
            self.price_sell[start:stop],
            self.dt_hours,
        )


@dataclass
class CostLedger:
    per_interval_cost: list[float] = field(default_factory=list)

    def add(self, cost: float) -> None:
        self.per_interval_cost.append(cost)

    @property
    def total_cost(self) -> float:
        total = 0.0
        for c in self.per_interval_cost:
            total += c
        return total


def split_grid(load_kw: float, pv_kw: float, charge_kw: float, discharge_kw: float) -> tuple[float, float]:
    """Return ``(grid_buy_kw, grid_sell_kw)`` closing the power balance."""
    net = load_kw - pv_kw - discharge_kw + charge_kw
    if net >= 0:
        return net, 0.0
    return 0.0, -net


def make_action(load_kw: float, pv_kw: float, charge_kw: float = 0.0, discharge_kw: float = 0.0) -> DispatchAction:
    buy, sell = split_grid(load_kw, pv_kw, charge_kw, discharge_kw)
    return DispatchAction(charge_kw, discharge_kw, buy, sell)


def interval_cost(action: DispatchAction, price_buy: float, price_sell: float, dt_hours: float) -> float:
    return (price_buy * action.grid_buy_kw - price_sell * action.grid_sell_kw) * dt_hours


def step_battery(
    state: BatteryState,
    action: DispatchAction,
    params: BatteryParams,
    dt_hours: float,
    tol: float = BOUNDS_TOL_KWH,
) -> BatteryState:
    """Advance stored energy by one interval.

    ``E' = E - dt * (discharge / eff_discharge - eff_charge * charge)``.
    Results within ``tol`` outside the band are snapped onto the bound;
    anything further raises :class:`BoundsViolation`.
    """
    ch, dc = action.charge_kw, action.discharge_kw
    if ch < -RATE_TOL_KW or dc < -RATE_TOL_KW:
        raise BoundsViolation(f"negative battery power (charge={ch}, discharge={dc})")
    if ch > params.charge_rate_kw + RATE_TOL_KW:
        raise BoundsViolation(f"charge {ch} kW exceeds rate {params.charge_rate_kw} kW")
    if dc > params.discharge_rate_kw + RATE_TOL_KW:
        raise BoundsViolation(f"discharge {dc} kW exceeds rate {params.discharge_rate_kw} kW")
    if ch > 0 and dc > 0:
        raise BoundsViolation("simultaneous charge and discharge")

    energy = state.energy_kwh - dt_hours * (dc / params.eff_discharge - params.eff_charge * ch)
    e_min, e_max = params.e_min_kwh, params.e_max_kwh
    if energy > e_max:
        if energy > e_max + tol:
            raise BoundsViolation(f"energy {energy:.9f} kWh above e_max {e_max} kWh")
        energy = e_max
    elif energy < e_min:
        if energy < e_min - tol:
            raise BoundsViolation(f"energy {energy:.9f} kWh below e_min {e_min} kWh")
        energy = e_min
    return BatteryState(energy)


def charge_cap(load_kw: float, pv_kw: float, energy_kwh: float, params: BatteryParams, dt_hours: float) -> float:
    """Largest admissible charge power; the PV surplus caps it when pv > load."""
    cap = min(params.charge_rate_kw, (params.e_max_kwh - energy_kwh) / (params.eff_charge * dt_hours))
    if pv_kw > load_kw:
        cap = min(cap, pv_kw - load_kw)
    return max(cap, 0.0)


def discharge_cap(load_kw: float, pv_kw: float, energy_kwh: float, params: BatteryParams, dt_hours: float) -> float:
    """Largest admissible discharge power; the deficit caps it when load > pv."""
    cap = min(params.discharge_rate_kw, params.eff_discharge * (energy_kwh - params.e_min_kwh) / dt_hours)
    if load_kw > pv_kw:
        cap = min(cap, load_kw - pv_kw)
    return max(cap, 0.0)


def total_cost(costs: Sequence[float]) -> float:
    """Left-to-right sum, matching :attr:`CostLedger.total_cost`."""
    total = 0.0
    for c in costs:
        total += c
    return total
