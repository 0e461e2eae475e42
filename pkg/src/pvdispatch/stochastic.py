"""Lightweight stochastic price-responsive controller.

Each interval draws a uniform number against a charge request rate that falls
with the (PV-adjusted) normalized buy price. If no charge request fires, a
second draw is tested against a discharge request rate that rises with the
normalized sell price. Request powers are the largest values the battery
limits and the PV/load mismatch allow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

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
class SrrConfig:
    k_charge: float = 0.3
    k_discharge: float = 0.3
    epsilon: float = 1e-6

    def __post_init__(self):
        if not (self.k_charge > 0 and self.k_discharge > 0):
            raise ValidationError("k_charge and k_discharge must be > 0")
        if not 0 < self.epsilon <= 1e-3:
            raise ValidationError("epsilon must lie in (0, 1e-3]")


@dataclass(frozen=True, eq=False)
class NormalizedPrices:
    buy_norm: np.ndarray
    sell_norm: np.ndarray
    buy_modified_norm: np.ndarray


def normalize_prices(prices) -> np.ndarray:
    """Min-max scale a price series to [0, 1]; a flat series maps to 0.5."""
    prices = np.asarray(prices, dtype=float)
    if prices.size == 0:
        raise ValueError("price series is empty")
    lo, hi = prices.min(), prices.max()
    if hi == lo:
        return np.full(prices.shape, 0.5)
    return np.clip((prices - lo) / (hi - lo), 0.0, 1.0)


def modify_buy_prices(price_buy, load_kw, pv_kw) -> np.ndarray:
    """Replace the buy price by the series minimum wherever PV exceeds load."""
    price_buy = np.asarray(price_buy, dtype=float)
    load_kw = np.asarray(load_kw, dtype=float)
    pv_kw = np.asarray(pv_kw, dtype=float)
    if not price_buy.shape == load_kw.shape == pv_kw.shape:
        raise ValueError("price series must match the load and pv lengths")
    return np.where(pv_kw > load_kw, price_buy.min(), price_buy)


def prepare_prices(scenario: ScenarioSeries) -> NormalizedPrices:
    modified = modify_buy_prices(scenario.price_buy, scenario.load_kw, scenario.pv_kw)
    return NormalizedPrices(
        normalize_prices(scenario.price_buy),
        normalize_prices(scenario.price_sell),
        normalize_prices(modified),
    )


def srr_charge(rho_bn, cfg: SrrConfig = SrrConfig()):
    """Charge request probability; 1 at the cheapest price, 0 at the dearest."""
    rho = np.asarray(rho_bn, dtype=float)
    return -np.expm1(-cfg.k_charge * (1.0 - rho) / (rho + cfg.epsilon))


def srr_discharge(rho_sn, cfg: SrrConfig = SrrConfig()):
    """Discharge request probability; 0 at the cheapest price, ~1 at the dearest."""
    rho = np.asarray(rho_sn, dtype=float)
    return -np.expm1(-cfg.k_discharge * rho / (1.0 - rho + cfg.epsilon))


def _act(charge: bool, discharge: bool, load_kw, pv_kw, energy_kwh, params, dt_hours) -> DispatchAction:
    if charge:
        ch = charge_cap(load_kw, pv_kw, energy_kwh, params, dt_hours)
        return make_action(load_kw, pv_kw, ch, 0.0)
    if discharge:
        dc = discharge_cap(load_kw, pv_kw, energy_kwh, params, dt_hours)
        return make_action(load_kw, pv_kw, 0.0, dc)
    return make_action(load_kw, pv_kw)


def stochastic_decide(
    t: int,
    norm: NormalizedPrices,
    load_kw: float,
    pv_kw: float,
    state: BatteryState,
    params: BatteryParams,
    cfg: SrrConfig,
    rng,
    dt_hours: float = 1.0,
) -> DispatchAction:
    """One decision of the stochastic controller.

    ``rng`` needs a ``random()`` method returning uniforms on [0, 1); it is
    called once for the charge test and, only if that fails, once more for
    the discharge test.
    """
    charge = rng.random() < srr_charge(norm.buy_modified_norm[t], cfg)
    discharge = not charge and rng.random() < srr_discharge(norm.sell_norm[t], cfg)
    return _act(charge, discharge, load_kw, pv_kw, state.energy_kwh, params, dt_hours)


class StochasticController:
    """Stateful wrapper used by the simulation engine.

    Both uniforms of every interval are drawn up front in ``reset``, so
    skipping an interval (e.g. under an external override) leaves the draws
    of all other intervals unchanged.
    """

    name = "Proposed"
    stochastic = True

    def __init__(self, cfg: SrrConfig | None = None):
        self.cfg = cfg or SrrConfig()

    def reset(self, scenario: ScenarioSeries, params: BatteryParams, rng) -> None:
        norm = prepare_prices(scenario)
        self.norm = norm
        draws = rng.random((len(scenario), 2))
        self._charge = (draws[:, 0] < srr_charge(norm.buy_modified_norm, self.cfg)).tolist()
        self._discharge = (draws[:, 1] < srr_discharge(norm.sell_norm, self.cfg)).tolist()
        self._load = scenario.load_kw.tolist()
        self._pv = scenario.pv_kw.tolist()
        self._dt = scenario.dt_hours
        self._params = params

    def decide(self, t: int, state: BatteryState) -> DispatchAction:
        return _act(
            self._charge[t],
            self._discharge[t],
            self._load[t],
            self._pv[t],
            state.energy_kwh,
            self._params,
            self._dt,
        )
