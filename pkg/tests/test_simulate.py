import numpy as np
import pytest

from meetlab.adversary import solve_meeting
from meetlab.errors import AllTimedOut, InvalidParams
from meetlab.graph import generate
from meetlab.simulate import (
    activation_sequence, alternating_scheduler, avoid_original_scheduler, fairness_ok,
    fixed_scheduler, make_scheduler, monte_carlo, original_meeting_events, random_scheduler,
    run_trial, worker_count,
)
from meetlab.states import AtomicWalk, StateSpace


@pytest.fixture(scope="module")
def p2_opt():
    return solve_meeting(generate("path", 2))


@pytest.mark.parametrize("kind", ["optimal", "random", "alternating", "avoid-original"])
def test_p2_every_scheduler_takes_two(p2_opt, kind):
    walk = p2_opt.walk
    sched = make_scheduler(kind, walk, p2_opt.policy)
    mc = monte_carlo(walk, sched, ("v:0", "v:1"), base_seed=5, trials=500, max_rounds=100)
    assert mc.mean == 2.0 and mc.stderr == 0.0
    assert mc.histogram == {2: 500}


def test_start_at_meeting(p2_opt):
    sched = random_scheduler(p2_opt.walk)
    assert run_trial(p2_opt.walk, sched, ("v:1", "v:1"), seed=0, max_rounds=10).meeting_round == 0
    assert run_trial(p2_opt.walk, sched, ("i:0>1", "i:1>0"), 0, 10).meeting_round == 0


def test_run_trial_replays_monte_carlo():
    g = generate("lollipop", 8, k=4)
    walk = StateSpace(g)
    sched = random_scheduler(walk)
    start = ("v:0", "v:7")
    mc = monte_carlo(walk, sched, start, base_seed=100, trials=50, max_rounds=10_000)
    for i in range(50):
        tr = run_trial(walk, sched, start, seed=100 + i, max_rounds=10_000)
        assert tr.meeting_round == mc.rounds[i]


def test_reproducible_and_thread_independent(monkeypatch):
    walk = AtomicWalk(generate("cycle", 6))
    sched = random_scheduler(walk)
    args = (walk, sched, ("v:0", "v:3"), 42, 60_000)
    one = monte_carlo(*args, max_rounds=5000, threads=1)
    many = monte_carlo(*args, max_rounds=5000, threads=3)
    assert np.array_equal(one.rounds, many.rounds)
    assert one.mean == many.mean and one.stderr == many.stderr
    monkeypatch.setenv("MEETLAB_THREADS", "2")
    assert worker_count() == 2
    monkeypatch.setenv("MEETLAB_THREADS", "bogus")
    assert worker_count() >= 1


def test_mean_close_to_exact_value():
    g = generate("complete", 4)
    sol = solve_meeting(g)
    sched = make_scheduler("optimal", sol.walk, sol.policy)
    mc = monte_carlo(sol.walk, sched, ("v:0", "v:1"), base_seed=1, trials=20_000)
    assert abs(mc.mean - sol.value("v:0", "v:1")) <= 4 * mc.stderr


def test_trajectory_recorded(p2_opt):
    tr = run_trial(p2_opt.walk, random_scheduler(p2_opt.walk), ("v:0", "v:1"), 3, 10, record=5)
    assert tr.trajectory[0] == ("v:0", "v:1")
    assert len(tr.trajectory) == 3 and tr.meeting_round == 2


def test_avoid_original_never_meets_on_c4():
    walk = StateSpace(generate("cycle", 4))
    sched = avoid_original_scheduler(walk)
    with pytest.raises(AllTimedOut) as exc:
        monte_carlo(walk, sched, ("v:0", "v:2"), 0, 200, max_rounds=2000, meet_mode="original")
    assert exc.value.summary.timeouts == 200
    tr = run_trial(walk, sched, ("v:0", "v:2"), 0, 500, meet_mode="original")
    assert tr.timed_out


@pytest.mark.parametrize("family, n", [("path", 3), ("cycle", 4), ("complete", 3)])
@pytest.mark.parametrize("kind", ["avoid-original", "alternating"])
def test_no_original_meetings(family, n, kind):
    walk = StateSpace(generate(family, n))
    sched = make_scheduler(kind, walk)
    start = ("v:0", f"v:{n - 1}")
    assert original_meeting_events(walk, sched, start, 0, 200, 2000) == 0


def test_original_events_counted_for_random():
    walk = StateSpace(generate("path", 3))
    assert original_meeting_events(walk, random_scheduler(walk), ("v:0", "v:2"), 0, 50, 200) > 0


def test_alternating_pattern_and_fairness():
    walk = StateSpace(generate("path", 3))
    seq = activation_sequence(alternating_scheduler(), walk, ("v:0", "v:2"), 0, 10)
    assert seq == [1, 2, 1, 1, 2, 2, 1, 1, 2, 2]
    assert fairness_ok(seq, 2)
    assert not fairness_ok([1, 2, 2, 2], 2)


def test_parameter_errors(p2_opt):
    walk = p2_opt.walk
    sched = random_scheduler(walk)
    with pytest.raises(InvalidParams):
        monte_carlo(walk, sched, ("v:0", "v:1"), 0, 0)
    with pytest.raises(InvalidParams):
        monte_carlo(walk, sched, ("v:0", "v:1"), 0, 10, max_rounds=0)
    with pytest.raises(InvalidParams):
        monte_carlo(walk, sched, ("v:0", "v:1"), 0, 10, meet_mode="edge")
    with pytest.raises(InvalidParams):
        make_scheduler("optimal", walk)
    with pytest.raises(InvalidParams):
        make_scheduler("sideways", walk)
    with pytest.raises(InvalidParams):
        fixed_scheduler(np.full((4, 4), 1.5))
    with pytest.raises(InvalidParams):
        fixed_scheduler(np.ones(4))


def test_summary_dict(p2_opt):
    mc = monte_carlo(p2_opt.walk, random_scheduler(p2_opt.walk), ("v:0", "v:1"), 0, 10)
    d = mc.to_dict()
    assert d["trials"] == 10 and d["timeouts"] == 0 and d["histogram"] == {"2": 10}
