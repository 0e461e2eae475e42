import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pvdispatch import BatteryParams, MilpProblem, solve_dp_oracle, solve_lp_relaxation, solve_milp
from pvdispatch.milp import to_lp_format

P = BatteryParams()


def random_problem(rng, T=None):
    T = T or int(rng.integers(2, 9))
    sell = rng.uniform(0, 0.5, T)
    return MilpProblem(
        load_kw=rng.uniform(0, 5, T),
        pv_kw=rng.uniform(0, 5, T) * rng.integers(0, 2, T),
        price_buy=sell + rng.uniform(0, 0.5, T),
        price_sell=sell,
        initial_energy_kwh=float(rng.uniform(P.e_min_kwh, P.e_max_kwh)),
        params=P,
    )


def assert_feasible(prob, sol):
    p = prob.params
    assert sol.optimal
    assert np.all(sol.charge_kw <= p.charge_rate_kw + 1e-9)
    assert np.all(sol.discharge_kw <= p.discharge_rate_kw + 1e-9)
    assert np.all(sol.charge_kw >= 0) and np.all(sol.discharge_kw >= 0)
    assert np.all(sol.charge_kw * sol.discharge_kw == 0)
    assert np.all(sol.grid_buy_kw * sol.grid_sell_kw == 0)
    bal = sol.grid_buy_kw - sol.grid_sell_kw + prob.pv_kw + sol.discharge_kw - sol.charge_kw - prob.load_kw
    assert np.abs(bal).max() <= 1e-9
    e = prob.initial_energy_kwh
    for t in range(prob.horizon):
        e = e + prob.dt_hours * (p.eff_charge * sol.charge_kw[t] - sol.discharge_kw[t] / p.eff_discharge)
        assert sol.energy_kwh[t] == pytest.approx(e, abs=1e-7)
    assert np.all(sol.energy_kwh >= p.e_min_kwh - 1e-9) and np.all(sol.energy_kwh <= p.e_max_kwh + 1e-9)
    cost = sum((prob.price_buy * sol.grid_buy_kw - prob.price_sell * sol.grid_sell_kw) * prob.dt_hours)
    assert sol.objective == pytest.approx(cost, abs=1e-9)


def two_step():
    return MilpProblem([0, 0], [0, 0], [0.1, 1.0], [0.05, 0.9], 1.35, P)


def test_two_step_arbitrage():
    sol = solve_milp(two_step())
    assert sol.objective == pytest.approx(-5.411, abs=1e-9)
    assert sol.charge_kw == pytest.approx([7, 0])
    assert sol.discharge_kw == pytest.approx([0, 6.79])
    assert_feasible(two_step(), sol)


def test_two_step_dp_within_grid_error():
    assert solve_dp_oracle(two_step(), 0.01).objective == pytest.approx(-5.411, abs=0.02)


def test_single_interval():
    prob = MilpProblem([5], [0], [0.5], [0.1], 4.05, P)
    sol = solve_milp(prob)
    assert sol.discharge_kw[0] == pytest.approx(2.7)
    assert sol.grid_buy_kw[0] == pytest.approx(2.3)
    assert sol.objective == pytest.approx(1.15)


def test_zero_prices():
    rng = np.random.default_rng(0)
    prob = MilpProblem(rng.uniform(0, 5, 6), rng.uniform(0, 5, 6), np.zeros(6), np.zeros(6), 4.05, P)
    assert solve_milp(prob).objective == pytest.approx(0, abs=1e-12)
    assert solve_dp_oracle(prob).objective == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("seed", range(30))
def test_single_interval_dp_matches_enumeration(seed):
    """One interval: scan every charge/discharge level on a fine grid."""
    prob = random_problem(np.random.default_rng(seed), T=1)
    p, e0 = prob.params, prob.initial_energy_kwh
    ch_max = min(p.charge_rate_kw, (p.e_max_kwh - e0) / p.eff_charge)
    dc_max = min(p.discharge_rate_kw, (e0 - p.e_min_kwh) * p.eff_discharge)
    levels = np.concatenate([-np.linspace(0, dc_max, 20001), np.linspace(0, ch_max, 20001)])
    net = prob.load_kw[0] - prob.pv_kw[0] + levels
    costs = np.where(net > 0, prob.price_buy[0] * net, prob.price_sell[0] * net)
    dp = solve_dp_oracle(prob).objective
    assert dp <= costs.min() + 1e-12
    assert dp == pytest.approx(costs.min(), abs=1e-3)
    assert dp == pytest.approx(solve_milp(prob).objective, abs=1e-9)


@pytest.mark.parametrize("seed", range(40))
def test_random_instances_against_dp(seed):
    prob = random_problem(np.random.default_rng(seed))
    sol = solve_milp(prob)
    dp = solve_dp_oracle(prob, 0.01).objective
    assert_feasible(prob, sol)
    assert sol.objective <= dp + 1e-9
    assert dp - sol.objective <= 0.05
    assert solve_lp_relaxation(prob).fun <= sol.objective + 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_feasibility_property(seed):
    prob = random_problem(np.random.default_rng(seed))
    assert_feasible(prob, solve_milp(prob))


def test_resolve_is_bit_identical():
    prob = random_problem(np.random.default_rng(7), T=8)
    a, b = solve_milp(prob), solve_milp(prob)
    assert a.objective == b.objective
    for name in ("charge_kw", "discharge_kw", "grid_buy_kw", "grid_sell_kw", "energy_kwh"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


def test_branching_needed_instance():
    """Negative prices reward simultaneous charge/discharge in the relaxation."""
    prob = MilpProblem([0, 0], [0, 0], [-0.2, 0.3], [-0.3, 0.2], 4.05, P)
    sol = solve_milp(prob)
    assert_feasible(prob, sol)
    assert sol.objective <= solve_dp_oracle(prob).objective + 1e-9
    assert solve_lp_relaxation(prob).fun <= sol.objective + 1e-9


def test_invalid_problem_rejected():
    with pytest.raises(ValueError):
        MilpProblem([], [], [], [], 4.05, P)
    with pytest.raises(ValueError):
        MilpProblem([1], [0], [0.3], [0.1], 20.0, P)


def test_lp_format_dump():
    text = to_lp_format(two_step())
    assert text.startswith("\\") and text.rstrip().endswith("End")
    for section in ("Minimize", "Subject To", "Bounds", "Binaries"):
        assert section in text
    assert "X_0" in text and "E_1" in text
