"""Worst-case (adversarial) meeting times as a max-expected-absorption MDP.

A configuration is an ordered pair of agent states ``(a, b)`` flattened to
``a * N + b``. Each round the scheduler picks agent 1 or 2; the picked agent
steps to a uniform successor. Meeting configurations absorb with value 0.

The optimal values are the least fixed point of::

    V(a, b) = 1 + max( mean_{z in N(a)} V(z, b),  mean_{z in N(b)} V(a, z) )

found by value iteration from zero, then sharpened by solving the linear
system of the greedy deterministic policy (with improvement steps until the
policy is stable).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from .errors import Diverged, NotConverged, ParseError, SingularSystem
from .graph import Graph, parse_graph, serialize
from .hidden import atomic_hidden_vertex, find_hidden, phi_atomic_matrix, phi_tilde_matrix
from .hitting import ext_hitting_formula, hitting_times
from .states import Walk, build_walk

log = logging.getLogger(__name__)

AGENT1, AGENT2 = 1, 2


@dataclass(frozen=True)
class MeetingSolution:
    walk: Walk
    values: np.ndarray = field(repr=False)
    policy: np.ndarray = field(repr=False)  # 1 or 2; 0 on meeting configurations
    mode: str
    iterations: int
    residual: float
    bound: np.ndarray = field(repr=False)   # potential used as divergence guard
    hidden: int                             # hidden state index (or vertex, atomic)
    monotone: bool = True                   # value-iteration iterates never decreased
    improvements: int = 0                   # policy-improvement rounds after VI

    def value(self, a, b) -> float:
        return float(self.values[self.walk.lookup(a), self.walk.lookup(b)])

    @property
    def max_value(self) -> float:
        return float(self.values.max())


def _as_walk(space, mode: str) -> Walk:
    graph = space if isinstance(space, Graph) else space.graph
    mode = "nonatomic" if mode == "non-atomic" else mode
    if isinstance(space, Walk) and space.mode == mode:
        return space
    return build_walk(graph, mode)


def _step_matrix(walk: Walk):
    P = walk.transition
    return P.toarray() if walk.size <= 400 else P


def _q_values(P, V):
    """Q-values of moving agent 1 and agent 2 in every configuration."""
    q1 = 1.0 + P @ V
    q2 = 1.0 + (P @ V.T).T
    return np.asarray(q1), np.asarray(q2)


def potential_bound(walk: Walk) -> tuple[np.ndarray, int]:
    """Potential that upper-bounds the meeting time, with the hidden element used."""
    h = hitting_times(walk.graph)
    if walk.mode == "atomic":
        z = atomic_hidden_vertex(h)
        return phi_atomic_matrix(h, z), z
    eh = ext_hitting_formula(walk, h)
    rep = find_hidden(eh, walk, h)
    return phi_tilde_matrix(eh, rep.chosen_hidden), rep.chosen_hidden


def config_transition(walk: Walk, policy: np.ndarray) -> sparse.csr_matrix:
    """Configuration-level transition matrix under a deterministic policy."""
    N = walk.size
    P = walk.transition
    I = sparse.identity(N, format="csr")
    move1 = sparse.diags((policy.ravel() == AGENT1).astype(float))
    move2 = sparse.diags((policy.ravel() == AGENT2).astype(float))
    return (move1 @ sparse.kron(P, I) + move2 @ sparse.kron(I, P)).tocsr()


def _can_absorb(T: sparse.csr_matrix, absorbing: np.ndarray) -> np.ndarray:
    reach = absorbing.copy()
    while True:
        nxt = reach | ((T @ reach.astype(float)) > 0)
        if (nxt == reach).all():
            return reach
        reach = nxt


def policy_evaluate(space, policy: np.ndarray, mode: str | None = None) -> np.ndarray:
    """Exact expected meeting time under a fixed deterministic policy.

    ``policy[a, b]`` is 1 or 2 (which agent moves) for every non-meeting
    configuration. Raises SingularSystem naming a configuration from which
    the policy never reaches a meeting.
    """
    walk = _as_walk(space, mode or getattr(space, "mode", "nonatomic"))
    N = walk.size
    meet = walk.meeting_mask.ravel()
    pol = np.asarray(policy).reshape(N, N)
    bad = ~meet & ~np.isin(pol.ravel(), (AGENT1, AGENT2))
    if bad.any():
        c = int(np.flatnonzero(bad)[0])
        raise ValueError(f"policy undefined at ({walk.label(c // N)}, {walk.label(c % N)})")
    T = config_transition(walk, pol)
    ok = _can_absorb(T, meet)
    if not ok.all():
        c = int(np.flatnonzero(~ok)[0])
        raise SingularSystem(
            f"policy never meets from ({walk.label(c // N)}, {walk.label(c % N)})"
        )
    tr = np.flatnonzero(~meet)
    values = np.zeros(N * N)
    if len(tr):
        A = sparse.identity(len(tr), format="csc") - T[tr][:, tr].tocsc()
        values[tr] = spsolve(A, np.ones(len(tr)))
    return values.reshape(N, N)


def greedy_policy(walk: Walk, V: np.ndarray, tie_tol: float = 0.0) -> np.ndarray:
    """Argmax agent per configuration; ties (within ``tie_tol``) go to agent 1."""
    q1, q2 = _q_values(_step_matrix(walk), V)
    pol = np.where(q1 >= q2 - tie_tol, AGENT1, AGENT2).astype(np.int8)
    pol[walk.meeting_mask] = 0
    return pol


def bellman_residual(walk: Walk, V: np.ndarray) -> float:
    q1, q2 = _q_values(_step_matrix(walk), V)
    R = np.abs(V - np.maximum(q1, q2))
    R[walk.meeting_mask] = np.abs(V[walk.meeting_mask])
    return float(R.max())


def solve_meeting(space, mode: str = "nonatomic", tol: float = 1e-9,
                  max_iters: int = 1_000_000, polish: bool = True,
                  max_improvements: int = 100) -> MeetingSolution:
    """Worst-case meeting times for every configuration.

    ``space`` may be a Graph, a StateSpace, or an AtomicWalk. ``mode`` is
    ``"atomic"`` or ``"nonatomic"``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    walk = _as_walk(space, mode)
    N = walk.size
    P = _step_matrix(walk)
    meet = walk.meeting_mask
    bound, hidden = potential_bound(walk)
    ceiling = bound + 1.0

    V = np.zeros((N, N))
    monotone = True
    it = 0
    delta = np.inf
    while it < max_iters:
        it += 1
        q1, q2 = _q_values(P, V)
        Vn = np.maximum(q1, q2)
        Vn[meet] = 0.0
        step = Vn - V
        monotone &= bool(step.min() >= -1e-12 * max(1.0, float(Vn.max())))
        delta = float(np.abs(step).max())
        V = Vn
        if it % 256 == 0 or delta < tol:
            over = V > ceiling
            if over.any():
                c = int(np.flatnonzero(over.ravel())[0])
                raise Diverged(
                    f"value at ({walk.label(c // N)}, {walk.label(c % N)}) = {V.flat[c]:.6g} "
                    f"exceeds potential {bound.flat[c]:.6g} + 1"
                )
        if delta < tol:
            break
    else:
        raise NotConverged(f"no convergence after {max_iters} iterations (last update {delta:.3e})")
    log.debug("value iteration: %d sweeps, last update %.3e", it, delta)

    improvements = 0
    if polish:
        eps = 1e-10 * max(1.0, float(V.max()))
        pol = greedy_policy(walk, V, tie_tol=eps)
        while True:
            W = policy_evaluate(walk, pol)
            q1, q2 = _q_values(P, W)
            cur = np.where(pol == AGENT1, q1, q2)
            other = np.where(pol == AGENT1, q2, q1)
            switch = (other > cur + eps) & ~meet
            if not switch.any() or improvements >= max_improvements:
                break
            pol = np.where(switch, np.where(pol == AGENT1, AGENT2, AGENT1), pol).astype(np.int8)
            improvements += 1
        # canonical tie-break toward agent 1 among value-equivalent choices
        canon = greedy_policy(walk, W, tie_tol=eps)
        if not np.array_equal(canon, pol):
            try:
                W2 = policy_evaluate(walk, canon)
                if np.abs(W2 - W).max() <= eps:
                    pol, W = canon, W2
            except SingularSystem:
                pass
        V = W
    else:
        pol = greedy_policy(walk, V)

    return MeetingSolution(
        walk=walk, values=V, policy=pol, mode=walk.mode, iterations=it,
        residual=bellman_residual(walk, V), bound=bound, hidden=hidden,
        monotone=monotone, improvements=improvements,
    )


def verify_meeteq(solution: MeetingSolution, tol: float = 1e-6) -> float:
    """Max violation of the per-configuration averaging equations.

    For each non-meeting configuration, the moved agent's average must equal
    the value and the other agent's average must not exceed it.
    """
    walk = solution.walk
    q1, q2 = _q_values(_step_matrix(walk), solution.values)
    V = solution.values
    pol = solution.policy
    live = ~walk.meeting_mask
    chosen = np.where(pol == AGENT1, q1, q2)
    other = np.where(pol == AGENT1, q2, q1)
    eq = np.abs(V - chosen)[live]
    excl = np.maximum(other - V, 0.0)[live]
    return float(max(eq.max(initial=0.0), excl.max(initial=0.0)))


def tied_configurations(solution: MeetingSolution, tol: float = 1e-9) -> int:
    """Non-meeting configurations where both agents' averages equal the value."""
    q1, q2 = _q_values(_step_matrix(solution.walk), solution.values)
    live = ~solution.walk.meeting_mask
    return int((np.abs(q1 - q2) <= tol * np.maximum(1.0, solution.values))[live].sum())


# -- policy files ----------------------------------------------------------------

def policy_to_json(solution: MeetingSolution) -> dict:
    walk = solution.walk
    labels = walk.labels()
    moves = {}
    for a in range(walk.size):
        for b in range(walk.size):
            if solution.policy[a, b]:
                moves[f"{labels[a]},{labels[b]}"] = int(solution.policy[a, b])
    return {"mode": solution.mode, "graph": serialize(walk.graph), "policy": moves}


def policy_from_json(data: dict | str) -> tuple[Walk, np.ndarray]:
    """Rebuild the walk and the policy array from :func:`policy_to_json` output."""
    if isinstance(data, str):
        data = json.loads(data)
    try:
        walk = build_walk(parse_graph(data["graph"]), data["mode"])
        moves = data["policy"]
    except KeyError as exc:
        raise ParseError(f"policy file missing field {exc}") from None
    pol = np.zeros((walk.size, walk.size), dtype=np.int8)
    for key, agent in moves.items():
        a, _, b = key.partition(",")
        if agent not in (AGENT1, AGENT2):
            raise ParseError(f"policy entry {key!r}: agent must be 1 or 2, got {agent!r}")
        pol[walk.lookup(a), walk.lookup(b)] = agent
    missing = ~walk.meeting_mask & (pol == 0)
    if missing.any():
        c = int(np.flatnonzero(missing.ravel())[0])
        raise ParseError(f"policy has no entry for ({walk.label(c // walk.size)}, "
                         f"{walk.label(c % walk.size)})")
    return walk, pol
