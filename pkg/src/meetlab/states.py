"""Agent states on the subdivided graph and the two walk models.

An agent is either at an original vertex ``v`` or mid-edge at an
intermediate state ``x>y`` (on the edge ``{x, y}``, heading to ``y``).
Both models share one interface, :class:`Walk`: integer-indexed states,
successor lists, and a ``bar`` map so that two agents meet iff
``a == b or a == bar[b]``. The atomic model is the plain walk on ``G`` with
``bar`` the identity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse

from .errors import ParseError
from .graph import Graph


@dataclass(frozen=True, order=True)
class Original:
    v: int

    def __str__(self) -> str:
        return f"v:{self.v}"


@dataclass(frozen=True, order=True)
class Intermediate:
    x: int
    y: int

    def __str__(self) -> str:
        return f"i:{self.x}>{self.y}"


State = Original | Intermediate

_STATE_RE = re.compile(r"^\s*(?:v:(\d+)|i:(\d+)>(\d+))\s*$")


def parse_state(text: str) -> State:
    """Inverse of ``str(state)``: ``"v:3"`` or ``"i:2>5"``."""
    mo = _STATE_RE.match(text)
    if mo is None:
        raise ParseError(f"bad state {text!r}; expected 'v:<n>' or 'i:<x>><y>'")
    if mo.group(1) is not None:
        return Original(int(mo.group(1)))
    return Intermediate(int(mo.group(2)), int(mo.group(3)))


def bar(s: State) -> State:
    if isinstance(s, Intermediate):
        return Intermediate(s.y, s.x)
    return s


def is_meeting(a: State, b: State) -> bool:
    return a == b or a == bar(b)


def project_f(s: State) -> int:
    """Vertex the state last left (or sits on)."""
    return s.x if isinstance(s, Intermediate) else s.v


def project_g(s: State) -> int:
    """Vertex the state is heading to (or sits on)."""
    return s.y if isinstance(s, Intermediate) else s.v


class Walk:
    """Index-level view of a single-agent walk used by the solvers.

    ``nbrs[i]`` holds successor indices (each taken with probability
    ``1/deg[i]``); ``bar[i]`` is the direction-reversed state.
    """

    mode: str

    def __init__(self, graph: Graph, states, nbrs, bar_idx):
        self.graph = graph
        self.states: tuple = tuple(states)
        self.index = {s: i for i, s in enumerate(self.states)}
        self.nbrs = tuple(np.asarray(nb, dtype=np.int64) for nb in nbrs)
        self.deg = np.array([len(nb) for nb in self.nbrs], dtype=np.int64)
        self.bar = np.asarray(bar_idx, dtype=np.int64)

    @property
    def size(self) -> int:
        return len(self.states)

    def __len__(self) -> int:
        return len(self.states)

    def label(self, i: int) -> str:
        return str(self.states[i])

    def labels(self) -> list[str]:
        return [str(s) for s in self.states]

    def lookup(self, s) -> int:
        """Index of a state given as a State object or its text form."""
        if isinstance(s, str):
            s = parse_state(s)
        if isinstance(s, (int, np.integer)) and not isinstance(s, bool):
            s = Original(int(s))
        try:
            return self.index[s]
        except KeyError:
            raise ParseError(f"state {s} does not exist in this {self.mode} model") from None

    def meets(self, i: int, j: int) -> bool:
        return i == j or i == self.bar[j]

    @cached_property
    def meeting_mask(self) -> np.ndarray:
        """Boolean ``size x size`` matrix of meeting configurations."""
        idx = np.arange(self.size)
        mask = np.zeros((self.size, self.size), dtype=bool)
        mask[idx, idx] = True
        mask[idx, self.bar] = True
        return mask

    @cached_property
    def transition(self) -> sparse.csr_matrix:
        rows, cols, vals = [], [], []
        for i, nb in enumerate(self.nbrs):
            rows.extend([i] * len(nb))
            cols.extend(nb.tolist())
            vals.extend([1.0 / len(nb)] * len(nb))
        return sparse.csr_matrix((vals, (rows, cols)), shape=(self.size, self.size))

    @cached_property
    def nbr_table(self) -> np.ndarray:
        """Successors padded to ``max(deg)`` columns with -1 (for vectorized sampling)."""
        table = np.full((self.size, int(self.deg.max())), -1, dtype=np.int64)
        for i, nb in enumerate(self.nbrs):
            table[i, : len(nb)] = nb
        return table

    @cached_property
    def original_vertex(self) -> np.ndarray:
        """Vertex of each original state, -1 for intermediate states."""
        return np.array([s.v if isinstance(s, Original) else -1 for s in self.states])


class StateSpace(Walk):
    """Non-atomic model: ``n + 2m`` states, originals first (by vertex),
    then intermediates sorted by ``(from, to)``."""

    mode = "nonatomic"

    def __init__(self, graph: Graph):
        originals = [Original(v) for v in range(graph.n)]
        inters = sorted(
            Intermediate(x, y) for x in range(graph.n) for y in graph.adjacency[x]
        )
        states = originals + inters
        index = {s: i for i, s in enumerate(states)}
        nbrs = []
        for s in states:
            if isinstance(s, Original):
                nbrs.append([index[Intermediate(s.v, w)] for w in graph.adjacency[s.v]])
            else:
                nbrs.append([index[Original(s.y)]])
        super().__init__(graph, states, nbrs, [index[bar(s)] for s in states])
        self.f = np.array([project_f(s) for s in states], dtype=np.int64)
        self.g = np.array([project_g(s) for s in states], dtype=np.int64)

    @property
    def n_original(self) -> int:
        return self.graph.n

    def is_intermediate(self, i: int) -> bool:
        return i >= self.graph.n

    def adjacent(self, s: State) -> list[State]:
        """N_as(s) as State objects."""
        return [self.states[j] for j in self.nbrs[self.index[s]]]


class AtomicWalk(Walk):
    """Atomic model: the simple random walk on G; meeting iff same vertex."""

    mode = "atomic"

    def __init__(self, graph: Graph):
        super().__init__(
            graph,
            [Original(v) for v in range(graph.n)],
            [list(graph.adjacency[v]) for v in range(graph.n)],
            np.arange(graph.n),
        )


def build_state_space(g: Graph) -> StateSpace:
    return StateSpace(g)


def build_walk(g: Graph, mode: str) -> Walk:
    if mode in ("nonatomic", "non-atomic"):
        return StateSpace(g)
    if mode == "atomic":
        return AtomicWalk(g)
    raise ValueError(f"unknown mode {mode!r}")
