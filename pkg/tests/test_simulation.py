import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pvdispatch import (
    BatteryParams,
    ExternalSignalConfig,
    IdleController,
    MpcConfig,
    MpcController,
    ScenarioSeries,
    ScmController,
    StochasticController,
    percent_difference,
    run_comparison,
    run_simulation,
    signal_sweep,
)
from pvdispatch.data import generate_synthetic
from pvdispatch.simulation import balance_residual

P = BatteryParams()


@pytest.fixture(scope="module")
def scenario():
    return generate_synthetic(days=2, seed=9)


def same_report(a, b):
    fields = ("charge_kw", "discharge_kw", "grid_buy_kw", "grid_sell_kw", "energy_kwh", "interval_cost", "overridden")
    return all(np.array_equal(getattr(a, f), getattr(b, f)) for f in fields) and a.total_cost == b.total_cost


@pytest.mark.parametrize("make", [IdleController, ScmController, StochasticController])
def test_zero_probability_equals_no_signals(scenario, make):
    a = run_simulation(scenario, make(), P, ExternalSignalConfig(0.0), seed=3)
    b = run_simulation(scenario, make(), P, None, seed=3)
    assert same_report(a, b) and a.intervals_overridden == 0


def test_forced_charging_fills_to_cap():
    s = ScenarioSeries(np.zeros(3), np.zeros(3), np.full(3, 0.3), np.full(3, 0.1))
    r = run_simulation(s, IdleController(), P, ExternalSignalConfig(1.0, 1.0), seed=0)
    assert r.energy_kwh == pytest.approx([10.84, 12.15, 12.15])
    assert r.intervals_overridden == 3


def test_idle_cost():
    s = ScenarioSeries([1, 1], [0, 0], [0.5, 0.5], [0.1, 0.1])
    assert run_simulation(s, IdleController(), P).total_cost == pytest.approx(1.0)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**9), prob=st.floats(0, 1), split=st.floats(0, 1))
def test_conservation_and_bounds(seed, prob, split):
    s = generate_synthetic(days=1, seed=seed % 50)
    for ctrl in (ScmController(), StochasticController()):
        r = run_simulation(s, ctrl, P, ExternalSignalConfig(prob, split), seed=seed)
        assert np.abs(balance_residual(r, s)).max() <= 1e-9
        assert np.all(r.charge_kw * r.discharge_kw == 0)
        assert np.all(r.charge_kw <= P.charge_rate_kw + 1e-9) and np.all(r.discharge_kw <= P.discharge_rate_kw + 1e-9)
        assert np.all(r.energy_kwh >= P.e_min_kwh - 1e-9) and np.all(r.energy_kwh <= P.e_max_kwh + 1e-9)
        assert r.total_cost == pytest.approx(float(np.sum(r.interval_cost)), abs=1e-9)


def test_replay_determinism(scenario):
    sig = ExternalSignalConfig(0.2, 0.5)
    a = run_simulation(scenario, StochasticController(), P, sig, seed=42)
    b = run_simulation(scenario, StochasticController(), P, sig, seed=42)
    assert same_report(a, b)


def test_signals_do_not_shift_controller_draws(scenario):
    """Intervals not overridden decide exactly as in the signal-free run."""
    base = run_simulation(scenario, StochasticController(), P, seed=8)
    sig = run_simulation(scenario, StochasticController(), P, ExternalSignalConfig(0.3), seed=8)
    first = int(np.argmax(sig.overridden))
    assert sig.intervals_overridden > 0
    assert np.array_equal(base.charge_kw[:first], sig.charge_kw[:first])


def test_runtime_accounting(scenario):
    r = run_simulation(scenario, ScmController(), P, ExternalSignalConfig(0.25), seed=1)
    assert r.controller_runtime_seconds >= 0
    assert len(r.decision_seconds) == 1 + len(scenario) - r.intervals_overridden
    assert r.controller_runtime_seconds == pytest.approx(sum(r.decision_seconds))


def test_percent_difference():
    assert percent_difference(2720.01, 2652.3) == pytest.approx(2.553, abs=5e-4)
    assert percent_difference(5.0, 5.0) == 0


def test_idle_vs_idle_zero_difference(scenario):
    res = run_comparison(scenario, [IdleController(), IdleController()], P)
    assert all(d == 0 for _, _, d in res.differences())


def test_mean_over_seeds(scenario):
    seeds = list(range(10))
    res = run_comparison(scenario, [StochasticController(), ScmController()], P, seeds=seeds)
    prop = res["Proposed"]
    assert len(prop.costs) == 10
    assert prop.mean_cost == pytest.approx(sum(prop.costs) / 10, rel=1e-15)
    assert prop.costs == [run_simulation(scenario, StochasticController(), P, seed=s).total_cost for s in seeds]
    assert len(res["SCM(dP=0.1)"].costs) == 1


def test_signal_sweep_pairs_seeds(scenario):
    rows = signal_sweep(scenario, StochasticController(), MpcController(MpcConfig(6)), P, [0.0, 0.5], [0, 1, 2])
    assert [r.probability for r in rows] == [0.0, 0.5]
    for r in rows:
        assert r.gap_percent == pytest.approx(np.mean(r.per_seed_gap))
        assert len(r.per_seed_gap) == 3


@pytest.mark.parametrize("kwargs", [{"probability": -0.1}, {"probability": 1.5}, {"direction_split": 2}])
def test_signal_config_validation(kwargs):
    with pytest.raises(ValueError):
        ExternalSignalConfig(**kwargs)
