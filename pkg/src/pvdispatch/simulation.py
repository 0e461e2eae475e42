"""Time-stepping simulation engine with external grid-service signals.

Random streams: the integer ``seed`` feeds ``numpy.random.SeedSequence``,
which is split with ``spawn(2)`` into a controller stream and a signal
stream, each driving a ``PCG64`` generator. Changing the signal probability
therefore never shifts the controller's draws, and vice versa.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from .core import (
    BatteryParams,
    BatteryState,
    DispatchAction,
    ScenarioSeries,
    ValidationError,
    charge_cap,
    discharge_cap,
    interval_cost,
    make_action,
    step_battery,
    total_cost,
)

SEED_MASK = (1 << 64) - 1


class Controller(Protocol):
    name: str

    def reset(self, scenario: ScenarioSeries, params: BatteryParams, rng: np.random.Generator) -> None: ...

    def decide(self, t: int, state: BatteryState) -> DispatchAction: ...


class IdleController:
    """Never touches the battery; the battery-less cost baseline."""

    name = "Idle"

    def reset(self, scenario, params, rng=None):
        self._load = scenario.load_kw.tolist()
        self._pv = scenario.pv_kw.tolist()

    def decide(self, t, state):
        return make_action(self._load[t], self._pv[t])


@dataclass(frozen=True)
class ExternalSignalConfig:
    probability: float = 0.0
    direction_split: float = 0.5

    def __post_init__(self):
        if not 0 <= self.probability <= 1:
            raise ValidationError("signal probability must lie in [0, 1]")
        if not 0 <= self.direction_split <= 1:
            raise ValidationError("direction_split must lie in [0, 1]")


@dataclass(eq=False)
class SimulationReport:
    method: str
    seed: int
    charge_kw: np.ndarray
    discharge_kw: np.ndarray
    grid_buy_kw: np.ndarray
    grid_sell_kw: np.ndarray
    energy_kwh: np.ndarray  # at the end of each interval
    interval_cost: np.ndarray
    overridden: np.ndarray
    decision_seconds: list[float] = field(repr=False)
    total_cost: float = 0.0
    controller_runtime_seconds: float = 0.0

    @property
    def intervals_overridden(self) -> int:
        return int(self.overridden.sum())

    def __len__(self) -> int:
        return self.charge_kw.size

    def soc(self, params: BatteryParams) -> np.ndarray:
        return self.energy_kwh / params.nominal_capacity_kwh


def make_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent controller and signal generators derived from one seed."""
    ctrl, sig = np.random.SeedSequence(int(seed) & SEED_MASK).spawn(2)
    return np.random.Generator(np.random.PCG64(ctrl)), np.random.Generator(np.random.PCG64(sig))


def run_simulation(
    scenario: ScenarioSeries,
    controller: Controller,
    params: BatteryParams,
    signals: ExternalSignalConfig | None = None,
    seed: int = 0,
) -> SimulationReport:
    """Simulate ``controller`` over the whole scenario.

    Each interval the signal stream draws two uniforms (occurrence, direction)
    whether or not a signal fires. A fired signal replaces the controller's
    decision with a maximal charge or discharge request; the controller is not
    consulted for that interval. Only ``reset`` and ``decide`` calls are timed.
    """
    signals = signals or ExternalSignalConfig()
    n = len(scenario)
    dt = scenario.dt_hours
    load = scenario.load_kw.tolist()
    pv = scenario.pv_kw.tolist()
    buy = scenario.price_buy.tolist()
    sell = scenario.price_sell.tolist()
    ctrl_rng, sig_rng = make_streams(seed)
    sig_draws = sig_rng.random((n, 2))
    fires = sig_draws[:, 0] < signals.probability
    to_charge = sig_draws[:, 1] < signals.direction_split

    clock = time.perf_counter
    timings = []
    t0 = clock()
    controller.reset(scenario, params, ctrl_rng)
    timings.append(clock() - t0)

    actions = np.zeros((n, 4))
    energy = np.zeros(n)
    costs = []
    state = params.initial_state()
    for t in range(n):
        if fires[t]:
            if to_charge[t]:
                ch = charge_cap(load[t], pv[t], state.energy_kwh, params, dt)
                action = make_action(load[t], pv[t], ch, 0.0)
            else:
                dc = discharge_cap(load[t], pv[t], state.energy_kwh, params, dt)
                action = make_action(load[t], pv[t], 0.0, dc)
        else:
            t0 = clock()
            action = controller.decide(t, state)
            timings.append(clock() - t0)
        state = step_battery(state, action, params, dt)
        actions[t] = action
        energy[t] = state.energy_kwh
        costs.append(interval_cost(action, buy[t], sell[t], dt))

    return SimulationReport(
        method=getattr(controller, "name", type(controller).__name__),
        seed=int(seed),
        charge_kw=actions[:, 0],
        discharge_kw=actions[:, 1],
        grid_buy_kw=actions[:, 2],
        grid_sell_kw=actions[:, 3],
        energy_kwh=energy,
        interval_cost=np.array(costs),
        overridden=fires.copy(),
        decision_seconds=timings,
        total_cost=total_cost(costs),
        controller_runtime_seconds=total_cost(timings),
    )


def balance_residual(report: SimulationReport, scenario: ScenarioSeries) -> np.ndarray:
    """``buy - sell + pv + discharge - charge - load`` per interval."""
    return (
        report.grid_buy_kw
        - report.grid_sell_kw
        + scenario.pv_kw
        + report.discharge_kw
        - report.charge_kw
        - scenario.load_kw
    )


def percent_difference(cost_a: float, cost_b: float) -> float:
    """Relative excess of ``cost_a`` over ``cost_b`` in percent."""
    return 100.0 * (cost_a - cost_b) / cost_b


@dataclass
class MethodResult:
    method: str
    costs: list[float]
    runtimes: list[float]
    reports: list[SimulationReport] = field(repr=False, default_factory=list)

    @property
    def mean_cost(self) -> float:
        return float(np.mean(self.costs))

    @property
    def std_cost(self) -> float:
        return float(np.std(self.costs, ddof=1)) if len(self.costs) > 1 else 0.0

    @property
    def mean_runtime(self) -> float:
        return float(np.mean(self.runtimes))


@dataclass
class ComparisonResult:
    methods: list[MethodResult]
    seeds: list[int]
    signal_probability: float = 0.0

    def __getitem__(self, method: str) -> MethodResult:
        for m in self.methods:
            if m.method == method:
                return m
        raise KeyError(method)

    def differences(self) -> list[tuple[str, str, float]]:
        """``(a, b, 100 * (cost_a - cost_b) / cost_b)`` for every ordered pair."""
        rows = []
        for a in self.methods:
            for b in self.methods:
                if a is not b:
                    rows.append((a.method, b.method, percent_difference(a.mean_cost, b.mean_cost)))
        return rows


def run_comparison(
    scenario: ScenarioSeries,
    controllers: Sequence[Controller],
    params: BatteryParams,
    signals: ExternalSignalConfig | None = None,
    seeds: Sequence[int] = (0,),
    keep_reports: bool = True,
) -> ComparisonResult:
    """Run every controller once per seed and aggregate costs and runtimes.

    Controllers without a ``stochastic`` attribute set to true are
    deterministic; when no external signals can fire they are run only once,
    since every seed would reproduce the same trajectory.
    """
    signals = signals or ExternalSignalConfig()
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ValueError("at least one seed is required")
    results = []
    for ctrl in controllers:
        stochastic = getattr(ctrl, "stochastic", False)
        run_seeds = seeds if (stochastic or signals.probability > 0) else seeds[:1]
        reports = [run_simulation(scenario, ctrl, params, signals, s) for s in run_seeds]
        results.append(
            MethodResult(
                method=reports[0].method,
                costs=[r.total_cost for r in reports],
                runtimes=[r.controller_runtime_seconds for r in reports],
                reports=reports if keep_reports else [],
            )
        )
    return ComparisonResult(results, seeds, signals.probability)


@dataclass
class SignalSweepRow:
    probability: float
    cost_proposed: float
    cost_mpc: float
    gap_percent: float
    gap_se: float
    per_seed_gap: list[float] = field(repr=False, default_factory=list)


def signal_sweep(
    scenario: ScenarioSeries,
    proposed: Controller,
    reference: Controller,
    params: BatteryParams,
    probabilities: Sequence[float],
    seeds: Sequence[int],
    direction_split: float = 0.5,
) -> list[SignalSweepRow]:
    """Cost gap of ``proposed`` over ``reference`` per signal probability.

    Both controllers see the same signal stream for a given seed, so the gap
    ``100 * (proposed - reference) / reference`` is formed per seed and then
    averaged; ``gap_se`` is its standard error over seeds.
    """
    rows = []
    ref_fixed = not getattr(reference, "stochastic", False)
    for prob in probabilities:
        signals = ExternalSignalConfig(prob, direction_split)
        prop_costs, ref_costs, gaps = [], [], []
        for s in seeds:
            cp = run_simulation(scenario, proposed, params, signals, s).total_cost
            if prob > 0 or not ref_fixed or not ref_costs:
                cr = run_simulation(scenario, reference, params, signals, s).total_cost
            prop_costs.append(cp)
            ref_costs.append(cr)
            gaps.append(percent_difference(cp, cr))
        n = len(gaps)
        se = float(np.std(gaps, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        rows.append(SignalSweepRow(prob, float(np.mean(prop_costs)), float(np.mean(ref_costs)),
                                   float(np.mean(gaps)), se, gaps))
    return rows
