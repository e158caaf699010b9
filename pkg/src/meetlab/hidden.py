"""The EHT preorder, hidden states/vertices, and the meeting-time potentials."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoHiddenState, NotHidden
from .hitting import ExtHitTable, HitTable, _idx, hitting_times
from .states import Intermediate, State, StateSpace

LEQ_TOL = 1e-9


def eht_leq(eh: ExtHitTable, s, t, tol: float = LEQ_TOL) -> bool:
    """s <=_EHT t  iff  H~(s, bar t) <= H~(t, bar s)."""
    ss = eh.space
    i, j = _idx(ss, s), _idx(ss, t)
    E, b = eh.values, ss.bar
    return bool(E[i, b[j]] <= E[j, b[i]] + tol)


def eht_relation(eh: ExtHitTable, tol: float = LEQ_TOL) -> np.ndarray:
    """Boolean matrix ``R[s, t] = s <=_EHT t``."""
    E, b = eh.values, eh.space.bar
    left = E[:, b]          # H~(s, bar t)
    right = E[:, b].T       # H~(t, bar s)
    return left <= right + tol


def ht_relation(h: HitTable, tol: float = LEQ_TOL) -> np.ndarray:
    """Boolean matrix ``R[v, w] = H(v, w) <= H(w, v)``."""
    return h.values <= h.values.T + tol


@dataclass(frozen=True)
class HiddenReport:
    space: StateSpace
    relation: np.ndarray = field(repr=False)
    hidden_states: tuple[int, ...]
    chosen_hidden: int
    atomic_hidden_vertex: int

    @property
    def chosen_state(self) -> Intermediate:
        return self.space.states[self.chosen_hidden]

    def hidden_labels(self) -> list[str]:
        return [self.space.label(i) for i in self.hidden_states]


def find_hidden(eh: ExtHitTable, ss: StateSpace | None = None,
                h: HitTable | None = None) -> HiddenReport:
    """Locate all minimal states under <=_EHT plus the atomic hidden vertex.

    The chosen hidden state is the lowest-indexed *intermediate* minimal
    state, since the closed-form bound needs one of the form ``t>u``.
    """
    ss = ss or eh.space
    if h is None:
        h = hitting_times(ss.graph)
    R = eht_relation(eh)
    hidden = tuple(int(i) for i in np.flatnonzero(R.all(axis=1)))
    if not hidden:
        raise NoHiddenState("no state is <=_EHT every other state; relation is not transitive")
    inter = [i for i in hidden if ss.is_intermediate(i)]
    if not inter:
        raise NoHiddenState(f"hidden states {hidden} contain no intermediate state")
    return HiddenReport(ss, R, hidden, inter[0], atomic_hidden_vertex(h))


def atomic_hidden_vertex(h: HitTable) -> int:
    """Lowest vertex z with H(z, v) <= H(v, z) for every v."""
    atomic = np.flatnonzero(ht_relation(h).all(axis=1))
    if not len(atomic):
        raise NoHiddenState("no atomic hidden vertex; hitting times violate the triangle identity")
    return int(atomic[0])


def is_hidden(eh: ExtHitTable, s, tol: float = LEQ_TOL) -> bool:
    i = _idx(eh.space, s)
    E, b = eh.values, eh.space.bar
    return bool(np.all(E[i, b] <= E[:, b[i]] + tol))


def _require_hidden(eh: ExtHitTable, hidden) -> int:
    i = _idx(eh.space, hidden)
    if not is_hidden(eh, i):
        raise NotHidden(f"{eh.space.label(i)} is not minimal under <=_EHT")
    return i


def phi_tilde_matrix(eh: ExtHitTable, hidden) -> np.ndarray:
    """Phi~ over every ordered pair of states for the given hidden state."""
    t = _require_hidden(eh, hidden)
    E, b = eh.values, eh.space.bar
    # Phi~(x, y) = H~(x, bar y) + H~(y, bar t) - H~(t, bar y)
    return E[:, b] + (E[:, b[t]] - E[t, b])[None, :]


def phi_tilde(eh: ExtHitTable, hidden, x, y) -> float:
    t = _require_hidden(eh, hidden)
    ss = eh.space
    i, j = _idx(ss, x), _idx(ss, y)
    E, b = eh.values, ss.bar
    return float(E[i, b[j]] + E[j, b[t]] - E[t, b[j]])


def _require_atomic_hidden(h: HitTable, z: int) -> None:
    H = h.values
    if not np.all(H[z, :] <= H[:, z] + LEQ_TOL):
        raise NotHidden(f"vertex {z} is not hidden: some H({z}, v) > H(v, {z})")


def phi_atomic_matrix(h: HitTable, z: int) -> np.ndarray:
    _require_atomic_hidden(h, z)
    H = h.values
    return H + (H[:, z] - H[z, :])[None, :]


def phi_atomic(h: HitTable, z: int, x: int, y: int) -> float:
    """H(x, y) + H(y, z) - H(z, y)."""
    _require_atomic_hidden(h, z)
    H = h.values
    return float(H[x, y] + H[y, z] - H[z, y])


def _hidden_edge(hidden, eh: ExtHitTable | None) -> tuple[int, int]:
    if isinstance(hidden, (int, np.integer)) or isinstance(hidden, str):
        if eh is None:
            raise TypeError("an index or label for the hidden state needs the ExtHitTable")
        hidden = eh.space.states[_idx(eh.space, hidden)]
    if not isinstance(hidden, Intermediate):
        raise NotHidden(f"closed-form bound needs an intermediate hidden state, got {hidden}")
    return hidden.x, hidden.y


def theorem1_bound(h: HitTable, hidden: State, x: int, y: int,
                   eh: ExtHitTable | None = None) -> float:
    """Closed-form bound on the non-atomic meeting time from original x, y.

    ``2 (H(x,y) + H(y,u) - H(u,y) + d_u - 1 + sum_{z ~ u, z != t} H(z,u))``
    for hidden state ``t>u``. Hiddenness is verified when ``eh`` is given.
    """
    t, u = _hidden_edge(hidden, eh)
    if eh is not None:
        _require_hidden(eh, Intermediate(t, u))
    return float(theorem1_matrix(h, t, u)[x, y])


def theorem1_matrix(h: HitTable, t: int, u: int) -> np.ndarray:
    g, H = h.graph, h.values
    tail = g.degree(u) - 1 + sum(H[z, u] for z in g.adjacency[u] if z != t)
    return 2.0 * (H + (H[:, u] - H[u, :])[None, :] + tail)


# -- structural checks ---------------------------------------------------------

def transitivity_violations(R: np.ndarray, samples: int = 10_000, seed: int = 0,
                            exhaustive_limit: int = 15) -> tuple[int, int]:
    """Count triples with R[x,y] and R[y,z] but not R[x,z]; returns (violations, checked)."""
    N = R.shape[0]
    if N <= exhaustive_limit:
        bad = R[:, :, None] & R[None, :, :] & ~R[:, None, :]
        return int(bad.sum()), N ** 3
    rng = np.random.default_rng(seed)
    x, y, z = rng.integers(0, N, size=(3, samples))
    bad = R[x, y] & R[y, z] & ~R[x, z]
    return int(bad.sum()), samples


def totality_violations(R: np.ndarray) -> int:
    return int((~(R | R.T)).sum())


def intermediate_below_original_violations(eh: ExtHitTable) -> int:
    """Count pairs (w>v, v) for which w>v <=_EHT v fails."""
    ss = eh.space
    bad = 0
    for v in range(ss.graph.n):
        for w in ss.graph.adjacency[v]:
            if not eht_leq(eh, Intermediate(w, v), v):
                bad += 1
    return bad


def phi_averaging_residual(eh: ExtHitTable, phi: np.ndarray) -> float:
    """Max residual of Phi~(a,b) = 1 + mean_{z in N(a)} Phi~(z,b) and of the
    same equation moving the second agent, over configurations with
    ``a != bar b`` (the equation presupposes the agents have not met)."""
    ss = eh.space
    P = ss.transition
    live = ss.bar[None, :] != np.arange(ss.size)[:, None]
    first = phi - 1.0 - P @ phi
    second = phi - 1.0 - (P @ phi.T).T
    return float(max(np.abs(first[live]).max(initial=0.0), np.abs(second[live]).max(initial=0.0)))
