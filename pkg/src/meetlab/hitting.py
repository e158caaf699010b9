"""Hitting times on G and extended hitting times on the state space.

Two independent routes produce the extended table: the closed-form case
analysis built on top of plain hitting times (:func:`ext_hitting_formula`),
and a direct absorbing-chain solve over all states
(:func:`ext_hitting_oracle`). Tests compare the two entrywise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularSystem
from .graph import Graph
from .linalg import gauss_solve
from .states import StateSpace, Walk

ABS_TOL = 1e-9
REL_TOL = 1e-12
ABS_TOL_LIMIT = 1e6


def residual_tol(magnitude: float) -> float:
    """Absolute 1e-9 up to magnitude 1e6, then relative 1e-12."""
    if magnitude <= ABS_TOL_LIMIT:
        return ABS_TOL
    return REL_TOL * magnitude


@dataclass(frozen=True)
class HitTable:
    graph: Graph
    values: np.ndarray = field(repr=False)

    def __getitem__(self, xy) -> float:
        return float(self.values[xy])

    @property
    def H_G(self) -> float:
        return float(self.values.max())


@dataclass(frozen=True)
class ExtHitTable:
    space: StateSpace
    values: np.ndarray = field(repr=False)
    source: str  # "formula" or "oracle"

    def __call__(self, s, t) -> float:
        """H~(s, t) for states given as State objects, labels, or indices."""
        return float(self.values[_idx(self.space, s), _idx(self.space, t)])


def _idx(space: Walk, s) -> int:
    if isinstance(s, (int, np.integer)) and not isinstance(s, bool):
        return int(s)
    return space.lookup(s)


def _absorbing_times(P: np.ndarray, target: int) -> np.ndarray:
    """Expected steps to reach ``target`` from each state of the chain ``P``."""
    n = P.shape[0]
    keep = np.array([i for i in range(n) if i != target], dtype=np.int64)
    A = np.eye(len(keep)) - P[np.ix_(keep, keep)]
    t = np.zeros(n)
    t[keep] = gauss_solve(A, np.ones(len(keep)))
    return t


def _check_equations(P: np.ndarray, T: np.ndarray, what: str) -> float:
    """Max residual of ``T[x,y] = 1 + sum_z P[x,z] T[z,y]`` over ``x != y``."""
    R = T - 1.0 - P @ T
    np.fill_diagonal(R, 0.0)
    worst = float(np.abs(R).max())
    if worst > residual_tol(float(T.max())):
        raise SingularSystem(f"{what}: residual {worst:.3e} exceeds tolerance")
    return worst


def hitting_times(g: Graph) -> HitTable:
    """H(x, y) for all vertex pairs, one linear solve per target."""
    P = g.transition_matrix()
    H = np.column_stack([_absorbing_times(P, y) for y in range(g.n)])
    _check_equations(P, H, "hitting_times")
    return HitTable(g, H)


def edge_entry_time(ss: StateSpace, h: HitTable, x: int, y: int) -> float:
    """H~(x, x>y): expected moves from vertex x until it steps onto edge x->y."""
    return 2 * ss.graph.degree(x) - 1 + sum(
        2.0 * h.values[z, x] for z in ss.graph.adjacency[x] if z != y
    )


def ext_hitting_formula(ss: StateSpace, h: HitTable) -> ExtHitTable:
    """Fill H~ from H by the original/intermediate case analysis."""
    n, N = ss.graph.n, ss.size
    H = h.values
    E = np.empty((N, N))
    # goal original: start original -> 2H, start x>y -> 1 + 2H(y, .)
    E[:n, :n] = 2.0 * H
    E[n:, :n] = 1.0 + 2.0 * H[ss.g[n:], :]
    # goal x>y: route through x, then leave x along x->y
    step = {}
    for j in range(n, N):
        x, y = int(ss.f[j]), int(ss.g[j])
        if (x, y) not in step:
            step[x, y] = edge_entry_time(ss, h, x, y)
        E[:, j] = E[:, x] + step[x, y]
        E[j, j] = 0.0
    return ExtHitTable(ss, E, "formula")


def ext_hitting_oracle(ss: StateSpace) -> ExtHitTable:
    """Solve the absorbing chain on all ``n + 2m`` states for each goal state."""
    P = ss.transition.toarray()
    E = np.column_stack([_absorbing_times(P, t) for t in range(ss.size)])
    _check_equations(P, E, "ext_hitting_oracle")
    return ExtHitTable(ss, E, "oracle")


def check_triangle_original(h: HitTable, x: int, y: int, z: int) -> float:
    H = h.values
    return abs(H[x, y] + H[y, z] + H[z, x] - H[x, z] - H[z, y] - H[y, x])


def check_triangle_extended(eh: ExtHitTable, x, y, z) -> float:
    ss = eh.space
    x, y, z = (_idx(ss, s) for s in (x, y, z))
    E, b = eh.values, ss.bar
    return abs(
        E[x, b[y]] + E[y, b[z]] + E[z, b[x]] - E[x, b[z]] - E[z, b[y]] - E[y, b[x]]
    )


def triangle_residual_original(h: HitTable) -> float:
    """Max triangle residual over every vertex triple."""
    H = h.values
    # axes (x, y, z)
    lhs = H[:, :, None] + H[None, :, :] + H.T[:, None, :]
    rhs = H[:, None, :] + H.T[None, :, :] + H.T[:, :, None]
    return float(np.abs(lhs - rhs).max())


def _triangle_ext_batch(E, b, x, y, z):
    return np.abs(
        E[x, b[y]] + E[y, b[z]] + E[z, b[x]] - E[x, b[z]] - E[z, b[y]] - E[y, b[x]]
    )


def triangle_residual_extended(eh: ExtHitTable, samples: int = 10_000, seed: int = 0,
                               exhaustive_limit: int = 15) -> tuple[float, int]:
    """Max extended-triangle residual; returns ``(worst, triples_checked)``.

    Exhaustive when the state count is at most ``exhaustive_limit``,
    otherwise ``samples`` uniformly drawn triples.
    """
    N = eh.space.size
    if N <= exhaustive_limit:
        x, y, z = (a.ravel() for a in np.meshgrid(*(np.arange(N),) * 3, indexing="ij"))
    else:
        rng = np.random.default_rng(seed)
        x, y, z = rng.integers(0, N, size=(3, samples))
    worst = _triangle_ext_batch(eh.values, eh.space.bar, x, y, z)
    return float(worst.max()), len(x)


def averaging_residual(eh: ExtHitTable) -> float:
    """Max residual of H~(s,t) = 1 + mean_{z in N(s)} H~(z,t) over s != t."""
    P = eh.space.transition
    R = eh.values - 1.0 - P @ eh.values
    np.fill_diagonal(R, 0.0)
    return float(np.abs(R).max())


def splitting_residual(eh: ExtHitTable) -> float:
    """Max residual of H~(s,t) = H~(s, f(t)) + H~(f(t), t) over s != t.

    On the diagonal with intermediate ``t`` the right side is a positive
    round trip, so those entries are excluded.
    """
    E, f = eh.values, eh.space.f
    R = E - (E[:, f] + E[f, np.arange(eh.space.size)][None, :])
    np.fill_diagonal(R, 0.0)
    return float(np.abs(R).max())


def embedding_residual(eh: ExtHitTable, h: HitTable) -> float:
    """Max |H~(x, y) - 2 H(x, y)| over original pairs."""
    n = h.graph.n
    return float(np.abs(eh.values[:n, :n] - 2.0 * h.values).max())
