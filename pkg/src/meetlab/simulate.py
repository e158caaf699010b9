"""Seeded Monte Carlo of the two-agent process under pluggable schedulers.

Trial ``i`` of a batch uses seed ``base_seed + i``; each round draws two
counter-based uniforms (which agent, which successor), so
``run_trial(seed=base_seed + i)`` replays trial ``i`` exactly.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import AllTimedOut, InvalidParams
from .states import Intermediate, Original, Walk

SCHEDULERS = ("optimal", "random", "alternating", "avoid-original", "fixed")
MEET_MODES = ("any", "original")


@dataclass(frozen=True)
class Scheduler:
    """Probability of moving agent 1, per configuration (and, for the
    alternating pattern, per round)."""

    kind: str
    prob1: np.ndarray | None = field(default=None, repr=False)

    def p_agent1(self, a, b, round_) -> np.ndarray:
        if self.kind == "alternating":
            return np.broadcast_to(_alternating_p1(round_), np.shape(a)).astype(float)
        return self.prob1[a, b]


def _alternating_p1(r: int) -> float:
    # agent order 1, 2, 1, 1, 2, 2, 1, 1, ...: each agent's first activation is single
    if r == 0:
        return 1.0
    if r == 1:
        return 0.0
    return 1.0 if ((r - 2) // 2) % 2 == 0 else 0.0


def optimal_scheduler(policy: np.ndarray) -> Scheduler:
    return Scheduler("optimal", (np.asarray(policy) == 1).astype(float))


def random_scheduler(walk: Walk, p: float = 0.5) -> Scheduler:
    return fixed_scheduler(np.full((walk.size, walk.size), p), kind="random")


def fixed_scheduler(table, kind: str = "fixed") -> Scheduler:
    table = np.asarray(table, dtype=float)
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise InvalidParams("probability table must be square over states")
    if (table < 0).any() or (table > 1).any():
        raise InvalidParams("scheduler probabilities must lie in [0, 1]")
    return Scheduler(kind, table)


def alternating_scheduler() -> Scheduler:
    return Scheduler("alternating")


def avoid_original_scheduler(walk: Walk) -> Scheduler:
    """Always move the agent sitting at v when the other is on an edge heading into v.

    Moves agent 1 in every other configuration.
    """
    p = np.ones((walk.size, walk.size))
    for s in walk.states:
        if isinstance(s, Intermediate):
            v = walk.index[Original(s.y)]
            p[walk.index[s], v] = 0.0
    return Scheduler("avoid-original", p)


def make_scheduler(kind: str, walk: Walk, policy=None) -> Scheduler:
    if kind == "optimal":
        if policy is None:
            raise InvalidParams("optimal scheduler needs a policy")
        return optimal_scheduler(policy)
    if kind == "random":
        return random_scheduler(walk)
    if kind == "alternating":
        return alternating_scheduler()
    if kind == "avoid-original":
        return avoid_original_scheduler(walk)
    raise InvalidParams(f"unknown scheduler {kind!r}; choose from {', '.join(SCHEDULERS[:4])}")


def _met(walk: Walk, a, b, meet_mode: str):
    if meet_mode == "any":
        return (a == b) | (a == walk.bar[b])
    if meet_mode == "original":
        return (a == b) & (walk.original_vertex[a] >= 0)
    raise InvalidParams(f"meet_mode must be one of {MEET_MODES}, got {meet_mode!r}")


def _step(walk: Walk, sched: Scheduler, a, b, seeds, r):
    u_agent = rng.uniform(seeds, r, 0)
    u_step = rng.uniform(seeds, r, 1)
    move1 = u_agent < sched.p_agent1(a, b, r)
    cur = np.where(move1, a, b)
    k = (u_step * walk.deg[cur]).astype(np.int64)
    nxt = walk.nbr_table[cur, k]
    return np.where(move1, nxt, a), np.where(move1, b, nxt), move1


@dataclass
class TrialResult:
    meeting_round: int | None          # None on timeout
    meeting_state: str | None
    trajectory: list[tuple[str, str]] = field(default_factory=list)

    @property
    def timed_out(self) -> bool:
        return self.meeting_round is None


def run_trial(walk: Walk, sched: Scheduler, start, seed: int, max_rounds: int,
              meet_mode: str = "any", record: int = 0) -> TrialResult:
    """Simulate one trial; ``record`` caps the logged trajectory length."""
    if max_rounds < 1:
        raise InvalidParams("max_rounds must be >= 1")
    a, b = (walk.lookup(s) for s in start)
    traj = []
    for r in range(max_rounds + 1):
        if len(traj) < record:
            traj.append((walk.label(a), walk.label(b)))
        if _met(walk, a, b, meet_mode):
            return TrialResult(r, walk.label(a), traj)
        if r == max_rounds:
            break
        na, nb, _ = _step(walk, sched, np.array([a]), np.array([b]), np.array([seed]), r)
        a, b = int(na[0]), int(nb[0])
    return TrialResult(None, None, traj)


def _simulate_block(walk, sched, a0, b0, seeds, max_rounds, meet_mode):
    """Meeting round per trial (-1 on timeout) for one block of seeds."""
    n = len(seeds)
    out = np.full(n, -1, dtype=np.int64)
    idx = np.arange(n)
    a = np.full(n, a0, dtype=np.int64)
    b = np.full(n, b0, dtype=np.int64)
    s = np.asarray(seeds, dtype=np.int64)
    for r in range(max_rounds + 1):
        met = _met(walk, a, b, meet_mode)
        if met.any():
            out[idx[met]] = r
            keep = ~met
            idx, a, b, s = idx[keep], a[keep], b[keep], s[keep]
        if not len(idx) or r == max_rounds:
            break
        a, b, _ = _step(walk, sched, a, b, s, r)
    return out


def worker_count() -> int:
    """Worker cap from MEETLAB_THREADS (0 or unset means one per CPU)."""
    try:
        k = int(os.environ.get("MEETLAB_THREADS", "0"))
    except ValueError:
        k = 0
    return k if k > 0 else (os.cpu_count() or 1)


@dataclass
class MonteCarloSummary:
    trials: int
    met: int
    timeouts: int
    mean: float | None
    stderr: float | None
    histogram: dict[int, int]
    rounds: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "trials": self.trials, "met": self.met, "timeouts": self.timeouts,
            "mean": self.mean, "stderr": self.stderr,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


def monte_carlo(walk: Walk, sched: Scheduler, start, base_seed: int, trials: int,
                max_rounds: int = 1_000_000, meet_mode: str = "any",
                threads: int | None = None) -> MonteCarloSummary:
    """Run ``trials`` seeded trials; timeouts are excluded from the mean.

    Raises AllTimedOut (carrying the summary) when no trial meets.
    """
    if trials < 1:
        raise InvalidParams("trials must be >= 1")
    if max_rounds < 1:
        raise InvalidParams("max_rounds must be >= 1")
    _met(walk, 0, 0, meet_mode)  # validates meet_mode
    a0, b0 = (walk.lookup(s) for s in start)
    seeds = base_seed + np.arange(trials, dtype=np.int64)
    k = min(threads or worker_count(), max(1, trials // 20_000))
    if k > 1:
        blocks = np.array_split(seeds, k)
        with ThreadPoolExecutor(k) as pool:
            parts = pool.map(
                lambda blk: _simulate_block(walk, sched, a0, b0, blk, max_rounds, meet_mode),
                blocks,
            )
            rounds = np.concatenate(list(parts))
    else:
        rounds = _simulate_block(walk, sched, a0, b0, seeds, max_rounds, meet_mode)

    done = rounds[rounds >= 0]
    met = len(done)
    mean = float(done.mean()) if met else None
    stderr = float(done.std(ddof=1) / np.sqrt(met)) if met > 1 else (0.0 if met else None)
    vals, counts = np.unique(done, return_counts=True)
    summary = MonteCarloSummary(
        trials=trials, met=met, timeouts=trials - met, mean=mean, stderr=stderr,
        histogram={int(v): int(c) for v, c in zip(vals, counts)}, rounds=rounds,
    )
    if met == 0:
        raise AllTimedOut(summary)
    return summary


def fairness_ok(agents: list[int], bound: int = 2) -> bool:
    """True if between consecutive activations of one agent the other runs at most ``bound`` times."""
    run = 0
    prev = None
    for ag in agents:
        run = run + 1 if ag == prev else 1
        prev = ag
        if run > bound:
            return False
    return True


def activation_sequence(sched: Scheduler, walk: Walk, start, seed: int, rounds: int) -> list[int]:
    """Which agent moved in each of the first ``rounds`` rounds (no stopping on meetings)."""
    a, b = (np.array([walk.lookup(s)]) for s in start)
    s = np.array([seed])
    seq = []
    for r in range(rounds):
        a, b, move1 = _step(walk, sched, a, b, s, r)
        seq.append(1 if move1[0] else 2)
    return seq


def original_meeting_events(walk: Walk, sched: Scheduler, start, base_seed: int, trials: int,
                            rounds: int, skip_rounds: int = 0) -> int:
    """Count (trial, round) pairs where both agents share an original vertex.

    Every round of every trial is inspected (trials do not stop at events);
    rounds below ``skip_rounds`` are ignored.
    """
    a0, b0 = (walk.lookup(s) for s in start)
    a = np.full(trials, a0, dtype=np.int64)
    b = np.full(trials, b0, dtype=np.int64)
    seeds = base_seed + np.arange(trials, dtype=np.int64)
    events = 0
    for r in range(rounds + 1):
        if r >= skip_rounds:
            events += int(_met(walk, a, b, "original").sum())
        if r == rounds:
            break
        a, b, _ = _step(walk, sched, a, b, seeds, r)
    return events
