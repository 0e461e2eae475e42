"""Horizon MILP for battery scheduling solved by branch and bound, plus a DP oracle.

Per interval ``t`` the model has grid purchase ``B``, grid injection ``S``,
charge ``CH``, discharge ``DC``, binaries ``X`` (discharge allowed) and
``Y`` (charge allowed), and end-of-interval energy ``E``::

    min  sum_t (buy_t * B_t - sell_t * S_t) * dt
    s.t. B_t - S_t + PV_t + DC_t - CH_t = L_t
         DC_t <= P_dcr * X_t
         CH_t <= P_chr * Y_t
         X_t + Y_t <= 1
         E_t = E_{t-1} - dt * (DC_t / eta_d - eta_c * CH_t)
         E_min <= E_t <= E_max
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import BatteryParams, ScenarioSeries, ValidationError, split_grid, total_cost
from .lp import OPTIMAL, LpResult, solve_lp

OPTIMAL_STATUS = "Optimal"
INFEASIBLE_STATUS = "Infeasible"

# charge and discharge above this are treated as simultaneous
ACTION_TOL = 1e-9

# variable blocks, in column order
_B, _S, _CH, _DC, _X, _Y, _E = range(7)
_NBLOCK = 7


@dataclass(frozen=True, eq=False)
class MilpProblem:
    load_kw: np.ndarray
    pv_kw: np.ndarray
    price_buy: np.ndarray
    price_sell: np.ndarray
    initial_energy_kwh: float
    params: BatteryParams = field(default_factory=BatteryParams)
    dt_hours: float = 1.0

    def __post_init__(self):
        for name in ("load_kw", "pv_kw", "price_buy", "price_sell"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        T = self.load_kw.size
        if T < 1:
            raise ValidationError("horizon must contain at least one interval")
        if not (self.pv_kw.size == self.price_buy.size == self.price_sell.size == T):
            raise ValidationError("window arrays must have equal length")
        p = self.params
        if not p.e_min_kwh - 1e-9 <= self.initial_energy_kwh <= p.e_max_kwh + 1e-9:
            raise ValidationError("initial energy outside [e_min, e_max]")
        if not self.dt_hours > 0:
            raise ValidationError("dt_hours must be > 0")

    @property
    def horizon(self) -> int:
        return self.load_kw.size

    @classmethod
    def from_scenario(cls, scenario: ScenarioSeries, start: int, stop: int, energy_kwh: float, params: BatteryParams):
        return cls(
            scenario.load_kw[start:stop],
            scenario.pv_kw[start:stop],
            scenario.price_buy[start:stop],
            scenario.price_sell[start:stop],
            energy_kwh,
            params,
            scenario.dt_hours,
        )


@dataclass
class MilpSolution:
    status: str
    objective: float
    charge_kw: np.ndarray
    discharge_kw: np.ndarray
    grid_buy_kw: np.ndarray
    grid_sell_kw: np.ndarray
    energy_kwh: np.ndarray
    nodes: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL_STATUS


@dataclass
class _Model:
    c: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    T: int
    basis: list[int]


def build_model(problem: MilpProblem) -> _Model:
    """Assemble the LP-relaxation matrices (binaries relaxed to [0, 1])."""
    T, p, dt = problem.horizon, problem.params, problem.dt_hours
    n = _NBLOCK * T
    idx = lambda block, t: block * T + t  # noqa: E731

    c = np.zeros(n)
    c[idx(_B, 0):idx(_B, 0) + T] = problem.price_buy * dt
    c[idx(_S, 0):idx(_S, 0) + T] = -problem.price_sell * dt

    A_eq = np.zeros((2 * T, n))
    b_eq = np.zeros(2 * T)
    A_ub = np.zeros((3 * T, n))
    b_ub = np.zeros(3 * T)
    for t in range(T):
        # power balance
        A_eq[t, idx(_B, t)] = 1.0
        A_eq[t, idx(_S, t)] = -1.0
        A_eq[t, idx(_DC, t)] = 1.0
        A_eq[t, idx(_CH, t)] = -1.0
        b_eq[t] = problem.load_kw[t] - problem.pv_kw[t]
        # energy recursion
        r = T + t
        A_eq[r, idx(_E, t)] = 1.0
        A_eq[r, idx(_DC, t)] = dt / p.eff_discharge
        A_eq[r, idx(_CH, t)] = -dt * p.eff_charge
        if t == 0:
            b_eq[r] = problem.initial_energy_kwh
        else:
            A_eq[r, idx(_E, t - 1)] = -1.0
        # rate linking and exclusivity
        A_ub[t, idx(_DC, t)] = 1.0
        A_ub[t, idx(_X, t)] = -p.discharge_rate_kw
        A_ub[T + t, idx(_CH, t)] = 1.0
        A_ub[T + t, idx(_Y, t)] = -p.charge_rate_kw
        A_ub[2 * T + t, idx(_X, t)] = 1.0
        A_ub[2 * T + t, idx(_Y, t)] = 1.0
        b_ub[2 * T + t] = 1.0

    # starting basis: grid exchange closes each balance, stored energy stays
    # at its initial level, every rate/exclusivity slack is basic
    basis = [idx(_B, t) if b_eq[t] >= 0 else idx(_S, t) for t in range(T)]
    basis += [idx(_E, t) for t in range(T)]
    basis += [n + r for r in range(3 * T)]

    lb = np.zeros(n)
    ub = np.full(n, np.inf)
    ub[idx(_CH, 0):idx(_CH, 0) + T] = p.charge_rate_kw
    ub[idx(_DC, 0):idx(_DC, 0) + T] = p.discharge_rate_kw
    ub[idx(_X, 0):idx(_Y, 0) + T] = 1.0
    lb[idx(_E, 0):idx(_E, 0) + T] = p.e_min_kwh
    ub[idx(_E, 0):idx(_E, 0) + T] = p.e_max_kwh
    return _Model(c, A_ub, b_ub, A_eq, b_eq, lb, ub, T, basis)


def _solve_node(model: _Model, lb: np.ndarray, ub: np.ndarray) -> LpResult:
    return solve_lp(model.c, model.A_ub, model.b_ub, model.A_eq, model.b_eq, bounds=(lb, ub),
                    initial_basis=model.basis)


def solve_lp_relaxation(problem: MilpProblem) -> LpResult:
    """Solve the MILP with ``X, Y`` relaxed to the unit interval."""
    model = build_model(problem)
    return _solve_node(model, model.lb, model.ub)


def _conflicts(model: _Model, x: np.ndarray) -> np.ndarray:
    T = model.T
    ch = x[_CH * T:(_CH + 1) * T]
    dc = x[_DC * T:(_DC + 1) * T]
    return np.flatnonzero((ch > ACTION_TOL) & (dc > ACTION_TOL))


def solve_milp(problem: MilpProblem) -> MilpSolution:
    """Globally optimal schedule by depth-first branch and bound.

    The root relaxation is accepted directly when it never charges and
    discharges in the same interval. Otherwise the most fractional discharge
    binary among conflicting intervals is branched on, and nodes whose
    relaxation bound cannot beat the incumbent are pruned.
    """
    model = build_model(problem)
    T = model.T
    best_x, best_val = None, np.inf
    stack = [(model.lb.copy(), model.ub.copy(), -np.inf)]
    nodes = 0
    while stack:
        lb, ub, parent_bound = stack.pop()
        if parent_bound >= best_val - 1e-12:
            continue
        res = _solve_node(model, lb, ub)
        nodes += 1
        if res.status != OPTIMAL or res.fun >= best_val - 1e-12:
            continue
        conflict = _conflicts(model, res.x)
        if conflict.size == 0:
            best_x, best_val = res.x, res.fun
            continue
        xs = res.x[_X * T + conflict]
        k = int(conflict[np.argmin(np.abs(xs - 0.5))])
        j = _X * T + k
        down_lb, down_ub = lb.copy(), ub.copy()
        down_ub[j] = 0.0
        up_lb, up_ub = lb.copy(), ub.copy()
        up_lb[j] = 1.0
        up_ub[_Y * T + k] = 0.0
        # the child the relaxation leans towards is explored first
        if res.x[j] >= 0.5:
            stack.append((down_lb, down_ub, res.fun))
            stack.append((up_lb, up_ub, res.fun))
        else:
            stack.append((up_lb, up_ub, res.fun))
            stack.append((down_lb, down_ub, res.fun))
    if best_x is None:
        empty = np.zeros(T)
        return MilpSolution(INFEASIBLE_STATUS, np.nan, empty, empty, empty, empty, empty, nodes)
    return _extract(problem, best_x, nodes)


def _extract(problem: MilpProblem, x: np.ndarray, nodes: int) -> MilpSolution:
    """Clean the LP vector into an exact schedule and recompute its cost."""
    T, p = problem.horizon, problem.params
    ch = np.clip(x[_CH * T:(_CH + 1) * T], 0.0, p.charge_rate_kw)
    dc = np.clip(x[_DC * T:(_DC + 1) * T], 0.0, p.discharge_rate_kw)
    ch[ch <= ACTION_TOL] = 0.0
    dc[dc <= ACTION_TOL] = 0.0
    return schedule_from_actions(problem, ch, dc, nodes=nodes)


def schedule_from_actions(problem: MilpProblem, ch, dc, nodes: int = 0, status: str = OPTIMAL_STATUS) -> MilpSolution:
    T, p, dt = problem.horizon, problem.params, problem.dt_hours
    ch = np.asarray(ch, dtype=float)
    dc = np.asarray(dc, dtype=float)
    energy = np.empty(T)
    buy = np.empty(T)
    sell = np.empty(T)
    costs = []
    e = problem.initial_energy_kwh
    for t in range(T):
        e = e - dt * (dc[t] / p.eff_discharge - p.eff_charge * ch[t])
        if p.e_max_kwh < e <= p.e_max_kwh + 1e-7:
            e = p.e_max_kwh
        elif p.e_min_kwh - 1e-7 <= e < p.e_min_kwh:
            e = p.e_min_kwh
        energy[t] = e
        buy[t], sell[t] = split_grid(problem.load_kw[t], problem.pv_kw[t], ch[t], dc[t])
        costs.append((problem.price_buy[t] * buy[t] - problem.price_sell[t] * sell[t]) * dt)
    return MilpSolution(status, total_cost(costs), ch, dc, buy, sell, energy, nodes)


def _single_step(load, pv, e, buy_price, sell_price, p: BatteryParams, dt):
    """Exact best one-interval action from energy level(s) ``e``.

    Cost is convex piecewise-linear in the battery power, so the optimum is at
    zero, a cap, or the point where the grid exchange vanishes.
    """
    e = np.atleast_1d(np.asarray(e, dtype=float))
    ch_max = np.clip(np.minimum(p.charge_rate_kw, (p.e_max_kwh - e) / (p.eff_charge * dt)), 0.0, None)
    dc_max = np.clip(np.minimum(p.discharge_rate_kw, p.eff_discharge * (e - p.e_min_kwh) / dt), 0.0, None)
    surplus = pv - load
    cands = [
        (np.zeros_like(e), np.zeros_like(e)),
        (ch_max, np.zeros_like(e)),
        (np.clip(surplus, 0.0, ch_max), np.zeros_like(e)),
        (np.zeros_like(e), dc_max),
        (np.zeros_like(e), np.clip(-surplus, 0.0, dc_max)),
    ]
    best_cost = np.full(e.shape, np.inf)
    best_ch = np.zeros_like(e)
    best_dc = np.zeros_like(e)
    for ch, dc in cands:
        net = load - pv + ch - dc
        cost = np.where(net >= 0, buy_price * net, sell_price * net) * dt
        better = cost < best_cost - 1e-15
        best_cost = np.where(better, cost, best_cost)
        best_ch = np.where(better, ch, best_ch)
        best_dc = np.where(better, dc, best_dc)
    return best_cost, best_ch, best_dc


def solve_dp_oracle(problem: MilpProblem, soc_grid_kwh: float = 0.01) -> MilpSolution:
    """Backward dynamic programming over a uniform energy lattice.

    Intermediate end-of-interval energies are restricted to
    ``e_min + k * soc_grid_kwh``; the final interval is solved exactly from
    each lattice point. The result is therefore an upper bound on the MILP
    optimum that tightens as the lattice is refined.
    """
    if not soc_grid_kwh > 0:
        raise ValueError("soc_grid_kwh must be > 0")
    p, dt, T = problem.params, problem.dt_hours, problem.horizon
    span = p.e_max_kwh - p.e_min_kwh
    k = int(np.floor(span / soc_grid_kwh + 1e-9))
    levels = p.e_min_kwh + soc_grid_kwh * np.arange(k + 1)
    if levels[-1] < p.e_max_kwh - 1e-12:
        levels = np.append(levels, p.e_max_kwh)
    levels = np.minimum(levels, p.e_max_kwh)

    def transition(t, e_from):
        """Cost and powers for moving from ``e_from`` (column) to each lattice level (row)."""
        delta = levels[None, :] - e_from[:, None]
        ch = np.where(delta > 0, delta / (p.eff_charge * dt), 0.0)
        dc = np.where(delta < 0, -delta * p.eff_discharge / dt, 0.0)
        ok = (ch <= p.charge_rate_kw + 1e-9) & (dc <= p.discharge_rate_kw + 1e-9)
        net = problem.load_kw[t] - problem.pv_kw[t] + ch - dc
        cost = np.where(net >= 0, problem.price_buy[t] * net, problem.price_sell[t] * net) * dt
        return np.where(ok, cost, np.inf), np.minimum(ch, p.charge_rate_kw), np.minimum(dc, p.discharge_rate_kw)

    e0 = np.array([problem.initial_energy_kwh])
    if T == 1:
        _, ch, dc = _single_step(problem.load_kw[0], problem.pv_kw[0], e0, problem.price_buy[0],
                                 problem.price_sell[0], p, dt)
        return schedule_from_actions(problem, ch, dc)

    # value[j] = optimal cost-to-go from lattice level j at the start of interval t
    value, last_ch, last_dc = _single_step(problem.load_kw[T - 1], problem.pv_kw[T - 1], levels,
                                           problem.price_buy[T - 1], problem.price_sell[T - 1], p, dt)
    policy = [None] * (T - 1)
    for t in range(T - 2, 0, -1):
        cost, _, _ = transition(t, levels)
        total = cost + value[None, :]
        choice = np.argmin(total, axis=1)
        policy[t] = choice
        value = total[np.arange(levels.size), choice]
    cost0, _, _ = transition(0, e0)
    total0 = cost0[0] + value
    j = int(np.argmin(total0))

    ch = np.zeros(T)
    dc = np.zeros(T)
    path = [j]
    for t in range(1, T - 1):
        path.append(int(policy[t][path[-1]]))
    e_prev = problem.initial_energy_kwh
    for t in range(T - 1):
        delta = levels[path[t]] - e_prev
        if delta > 0:
            ch[t] = min(delta / (p.eff_charge * dt), p.charge_rate_kw)
        elif delta < 0:
            dc[t] = min(-delta * p.eff_discharge / dt, p.discharge_rate_kw)
        e_prev = levels[path[t]]
    ch[T - 1] = last_ch[path[-1]]
    dc[T - 1] = last_dc[path[-1]]
    return schedule_from_actions(problem, ch, dc)


def to_lp_format(problem: MilpProblem) -> str:
    """Plain-text dump of the instance in CPLEX LP syntax for external cross-checks."""
    model = build_model(problem)
    T = model.T
    names = [f"{b}_{t}" for b in ("B", "S", "CH", "DC", "X", "Y", "E") for t in range(T)]

    def expr(row):
        terms = []
        for j in np.flatnonzero(row):
            coef = row[j]
            sign = "-" if coef < 0 else "+"
            terms.append(f"{sign} {abs(coef):.17g} {names[j]}")
        text = " ".join(terms)
        return text[2:] if text.startswith("+ ") else text

    lines = ["\\ battery scheduling horizon MILP", "Minimize", f" obj: {expr(model.c)}", "Subject To"]
    for i, row in enumerate(model.A_eq):
        lines.append(f" e{i}: {expr(row)} = {model.b_eq[i]:.17g}")
    for i, row in enumerate(model.A_ub):
        lines.append(f" u{i}: {expr(row)} <= {model.b_ub[i]:.17g}")
    lines.append("Bounds")
    for j, name in enumerate(names):
        hi = "+inf" if np.isinf(model.ub[j]) else f"{model.ub[j]:.17g}"
        lines.append(f" {model.lb[j]:.17g} <= {name} <= {hi}")
    lines.append("Binaries")
    lines.append(" " + " ".join(names[_X * T:(_Y + 1) * T]))
    lines.append("End")
    return "\n".join(lines) + "\n"
