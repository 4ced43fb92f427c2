from __future__ import annotations

import numpy as np
import pytest

from wavedecay.errors import BudgetExceeded
from wavedecay.fronts import (
    BumpTest,
    evolve,
    front_state_at,
    init_approx,
    solution_at,
    weak_residual,
)
from wavedecay.systems import AdmissibleRegion, builtin_burgers, builtin_p_system
from wavedecay.verify import simulate
from wavedecay.waves import PiecewiseConstantFn, glimm_Q, wave_measures

BURGERS = builtin_burgers()
P = builtin_p_system()
FAN = PiecewiseConstantFn([0.0], [[0.0], [1.0]])
MERGE = PiecewiseConstantFn([0.0, 1.0], [[1.0], [0.5], [0.0]])


def p_waves(*waves, left=(1.0, 0.0)):
    """Step data from elementary waves ``(x, family, strength)`` laid left to right."""
    values = [np.array(left)]
    for _, fam, s in waves:
        values.append(P.wave_curve(fam, values[-1], s))
    return PiecewiseConstantFn([w[0] for w in waves], values)


def random_burgers_data(rng, jumps=6, tv=0.3):
    xs = np.sort(rng.uniform(-1, 1, jumps))
    d = rng.normal(size=jumps)
    d *= tv / np.abs(d).sum()
    return PiecewiseConstantFn(xs, np.concatenate(([0.0], np.cumsum(d)))[:, None])


# -- initial approximation ------------------------------------------------------


def test_fan_is_split_into_equal_fronts():
    fs = init_approx(BURGERS, FAN, 0.25)
    assert fs.strength.tolist() == [0.25] * 4
    assert fs.speed.tolist() == [0.25, 0.5, 0.75, 1.0]
    assert fs.kinds == ["rarefaction"] * 4


def test_shock_gets_rankine_hugoniot_speed():
    fs = init_approx(BURGERS, PiecewiseConstantFn([0.0], [[1.0], [0.0]]), 0.1)
    assert fs.strength.tolist() == [-1.0]
    assert fs.speed.tolist() == [0.5]
    assert 0.0 < fs.speed[0] < 1.0


def test_p_system_jump_gives_fronts_ordered_by_speed():
    u = PiecewiseConstantFn([0.0], [[1.0, 0.0], [1.02, 0.03]])
    fs = init_approx(P, u, 0.005)
    assert set(fs.family.tolist()) == {1, 2}
    assert np.all(np.diff(fs.speed) > 0)
    assert np.all(fs.strength <= 0.005 + 1e-15)
    assert fs.composition_residual(P) <= 1e-10


def test_init_rejects_bad_delta_and_budget():
    with pytest.raises(ValueError):
        init_approx(BURGERS, FAN, 0.0)
    tight = builtin_burgers(AdmissibleRegion((0.0,), tv_budget=0.5))
    with pytest.raises(BudgetExceeded):
        init_approx(tight, FAN, 0.1)


# -- evolution ---------------------------------------------------------------------


def test_merging_shocks():
    fs = init_approx(BURGERS, MERGE, 0.1)
    assert fs.speed.tolist() == [0.75, 0.25]
    traj, log = evolve(BURGERS, fs, 3.0)
    assert len(log) == 1
    e = log[0]
    assert e.t == pytest.approx(2.0, abs=1e-14) and e.x == pytest.approx(1.5, abs=1e-14)
    assert e.dQ == pytest.approx(0.5)
    after = front_state_at(traj, 2.5)
    assert after.speed.tolist() == [0.5] and after.strength.tolist() == [-1.0]


def test_lone_rarefaction_has_no_events():
    traj, log = evolve(BURGERS, init_approx(BURGERS, FAN, 0.01), 5.0)
    assert len(log) == 0
    assert all(q == 0.0 for *_, q in traj.q_series)


def test_crossing_shocks_drop_Q_by_their_product():
    u = p_waves((0.0, 2, -0.05), (1.0, 1, -0.05))
    fs = init_approx(P, u, 0.01)
    traj, log = evolve(P, fs, 2.0)
    assert len(log) == 1
    e = log[0]
    assert e.families == (1, 2)
    assert e.Q_before == pytest.approx(0.05 * 0.05, rel=1e-12)
    assert e.dQ > 0 and e.Q_after < e.Q_before
    assert e.dQ == pytest.approx(0.0025, rel=0.05)


def test_solution_at_initial_time_is_the_datum():
    traj = simulate(BURGERS, MERGE, 3.0, 0.1)
    assert solution_at(traj, 0.0) == MERGE


def test_solution_at_on_the_fan():
    delta, t = 0.1, 2.0
    traj = simulate(BURGERS, FAN, 3.0, delta)
    u = solution_at(traj, t)
    assert u.jumps == pytest.approx(t * delta * np.arange(1, 11), abs=1e-14)
    assert np.diff(u.values[:, 0]) == pytest.approx(np.full(10, delta), abs=1e-14)


def test_solution_after_merge_has_one_jump():
    traj = simulate(BURGERS, MERGE, 3.0, 0.1)
    u = solution_at(traj, 2.5)
    assert u.jumps.tolist() == [pytest.approx(1.75)]
    with pytest.raises(ValueError):
        solution_at(traj, 3.5)


def test_evolve_rejects_past_final_time():
    with pytest.raises(ValueError):
        evolve(BURGERS, init_approx(BURGERS, FAN, 0.1), 0.0)


def test_observers_see_events_and_samples():
    seen = []
    evolve(BURGERS, init_approx(BURGERS, MERGE, 0.1), 3.0,
           observers=[lambda kind, fs, ev: seen.append((kind, fs.time))], sample_times=[1.0, 2.5])
    assert seen == [("sample", 1.0), ("event", pytest.approx(2.0)), ("sample", 2.5)]


# -- invariants ------------------------------------------------------------------------


@pytest.mark.parametrize("seed", range(4))
def test_potentials_decrease_at_every_event(seed):
    rng = np.random.default_rng(seed)
    waves = [(float(x), int(rng.integers(1, 3)), float(s))
             for x, s in zip(np.sort(rng.uniform(-1, 1, 5)), rng.uniform(-0.04, 0.04, 5))]
    traj = simulate(P, p_waves(*waves), 4.0, 0.005)
    assert len(traj.events) > 0
    for e in traj.events:
        assert e.dQ >= -1e-12
        assert e.d_upsilon(10.0) <= 1e-12
    for t in (1.0, 2.0, 4.0):
        fs = front_state_at(traj, t)
        assert np.all(np.diff(fs.x) >= -1e-12)
        assert fs.composition_residual(P) <= 1e-10
        assert np.all(fs.strength <= 0.005 * (1 + 1e-9))


def test_scalar_events_also_decrease_potentials(rng):
    for _ in range(5):
        traj = simulate(BURGERS, random_burgers_data(rng), 4.0, 0.005)
        for e in traj.events:
            assert e.dQ >= -1e-12 and e.d_upsilon(10.0) <= 1e-12


def test_budget_exceeded_names_the_time():
    u = p_waves((0.0, 2, -0.05), (1.0, 1, -0.05))
    tight = builtin_p_system(tv_budget=0.102)
    with pytest.raises(BudgetExceeded) as info:
        simulate(tight, u, 2.0, 0.01)
    assert info.value.time == pytest.approx(0.4318, abs=1e-3)
    assert "t=" in str(info.value)


def test_front_and_event_caps():
    with pytest.raises(BudgetExceeded):
        simulate(BURGERS, MERGE, 3.0, 0.1, max_events=0)
    with pytest.raises(BudgetExceeded):
        simulate(BURGERS, FAN, 3.0, 0.1, max_fronts=5)
    assert len(simulate(BURGERS, MERGE, 3.0, 0.1, max_events=1).events) == 1


def test_initial_Q_approaches_datum_Q(rng):
    for _ in range(5):
        u = random_burgers_data(rng)
        exact = glimm_Q(wave_measures(BURGERS, u))
        for delta in (0.01, 0.001):
            assert init_approx(BURGERS, u, delta).Q() == pytest.approx(exact, abs=1e-12)


def test_scalar_l1_convergence_to_rarefaction():
    # u0 = 0 | 0.3 at 0 | 0.5 at 1: two fans that never interact before t = 1
    u = PiecewiseConstantFn([0.0, 1.0], [[0.0], [0.3], [0.5]])
    xs = np.linspace(-0.5, 2.0, 20001)
    t = 1.0

    def exact(x):
        left = np.clip(x / t, 0.0, 0.3)
        right = np.clip((x - 1.0) / t, 0.3, 0.5)
        return np.where(x < 1.0, left, right)

    errs = []
    for delta in (0.02, 0.01, 0.005):
        v = solution_at(simulate(BURGERS, u, t, delta), t)(xs)[:, 0]
        errs.append(float(np.mean(np.abs(v - exact(xs))) * (xs[-1] - xs[0])))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.002


# -- weak formulation ---------------------------------------------------------------------


BATTERY = [BumpTest(tc, xc, 1.0, 1.0) for tc in (1.0, 2.0, 3.0) for xc in (0.5, 1.5, 2.5)]


def total_residual(traj):
    return sum(weak_residual(traj, phi) for phi in BATTERY)


def test_weak_residual_is_first_order_on_rarefactions():
    res = [total_residual(simulate(BURGERS, FAN, 4.0, d)) for d in (0.04, 0.02, 0.01, 0.005)]
    ratios = [b / a for a, b in zip(res, res[1:])]
    assert all(0.45 < r < 0.55 for r in ratios)


def test_shock_fronts_satisfy_the_weak_form_exactly():
    assert total_residual(simulate(BURGERS, MERGE, 4.0, 0.01)) <= 1e-14


def test_bump_test_support():
    phi = BumpTest(1.0, 0.0, 0.5, 0.5)
    assert phi(1.0, 0.0) == 1.0 and phi(1.6, 0.0) == 0.0
    assert phi.support_along(0.0, 0.0, 0.0, 0.0, 3.0) == (0.5, 1.5)
    assert phi.support_along(2.0, 0.0, 0.0, 0.0, 3.0) is None
