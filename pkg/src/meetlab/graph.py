"""Simple connected undirected graphs: validation, generators, edge-list I/O.

Vertices are the dense indices ``0..n-1``. The edge-list text format is::

    # comment
    n m
    u v        (m lines, 0 <= u < v < n)
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from .errors import InvalidParams, ParseError, ValidationError

FAMILIES = ("path", "cycle", "complete", "star", "lollipop", "random_connected")


@dataclass(frozen=True)
class Graph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]

    @cached_property
    def m(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Canonical edge list, ``u < v``, sorted lexicographically."""
        return tuple((u, v) for u in range(self.n) for v in self.adjacency[u] if u < v)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max())

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def transition_matrix(self) -> np.ndarray:
        """Row-stochastic matrix of the simple random walk on the graph."""
        P = np.zeros((self.n, self.n))
        for v, nb in enumerate(self.adjacency):
            P[v, list(nb)] = 1.0 / len(nb)
        return P

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def from_edges(n: int, edges, *, where=None) -> Graph:
    """Build and validate a graph from an iterable of vertex pairs.

    ``where`` optionally maps edge position to a human-readable location
    (e.g. a line number) used in error messages.
    """
    if n < 2:
        raise ValidationError(f"need at least 2 vertices, got n={n}")
    nbrs: list[set[int]] = [set() for _ in range(n)]
    count = 0
    for i, (u, v) in enumerate(edges):
        loc = where(i) if where else f"edge {i}"
        if not (0 <= u < n and 0 <= v < n):
            raise ValidationError(f"{loc}: vertex index out of range 0..{n - 1}: ({u}, {v})")
        if u == v:
            raise ValidationError(f"{loc}: self-loop at vertex {u}")
        if v in nbrs[u]:
            raise ValidationError(f"{loc}: duplicate edge ({min(u, v)}, {max(u, v)})")
        nbrs[u].add(v)
        nbrs[v].add(u)
        count += 1
    if count < 1:
        raise ValidationError("graph has no edges")
    g = Graph(n, tuple(tuple(sorted(s)) for s in nbrs))
    validate(g)
    return g


def _reachable(g: Graph, start: int = 0) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in g.adjacency[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def validate(g: Graph) -> None:
    """Raise ValidationError unless ``g`` satisfies every Graph invariant."""
    if g.n < 2 or len(g.adjacency) != g.n:
        raise ValidationError(f"need n >= 2 with one adjacency list per vertex, got n={g.n}")
    for v, nb in enumerate(g.adjacency):
        if list(nb) != sorted(set(nb)):
            raise ValidationError(f"adjacency of {v} is not sorted and duplicate-free")
        for w in nb:
            if w == v:
                raise ValidationError(f"self-loop at vertex {v}")
            if not 0 <= w < g.n:
                raise ValidationError(f"vertex index out of range: {w}")
            if v not in g.adjacency[w]:
                raise ValidationError(f"asymmetric adjacency: {v}->{w}")
    if g.m < 1:
        raise ValidationError("graph has no edges")
    seen = _reachable(g)
    if len(seen) != g.n:
        missing = sorted(set(range(g.n)) - seen)
        raise ValidationError(
            f"graph is disconnected: vertices {missing[:10]}{'...' if len(missing) > 10 else ''} "
            "unreachable from 0"
        )


def parse_graph(text: str) -> Graph:
    header = None
    edges: list[tuple[int, int]] = []
    lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected two integers, got {raw!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer token in {raw!r}") from None
        if header is None:
            if a < 2 or b < 1:
                raise ParseError(f"line {lineno}: header needs n >= 2 and m >= 1, got {raw!r}")
            header = (a, b)
            continue
        if not a < b:
            raise ParseError(f"line {lineno}: edge must satisfy u < v, got {raw!r}")
        edges.append((a, b))
        lines.append(lineno)
    if header is None:
        raise ParseError("missing 'n m' header line")
    n, m = header
    if len(edges) != m:
        raise ParseError(f"header declares m={m} edges but {len(edges)} edge lines follow")
    return from_edges(n, edges, where=lambda i: f"line {lines[i]}")


def serialize(g: Graph) -> str:
    out = [f"{g.n} {g.m}"]
    out.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(out) + "\n"


def read_graph(path) -> Graph:
    with open(path) as fh:
        return parse_graph(fh.read())


def _random_tree(n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    # Pruefer decoding: uniform over the n^(n-2) labeled trees.
    if n == 2:
        return [(0, 1)]
    seq = rng.integers(0, n, size=n - 2).tolist()
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    edges = []
    for v in seq:
        leaf = min(u for u in range(n) if degree[u] == 1)
        edges.append((min(leaf, v), max(leaf, v)))
        degree[leaf] -= 1
        degree[v] -= 1
    u, w = [x for x in range(n) if degree[x] == 1]
    edges.append((u, w))
    return edges


def generate(family: str, n: int, k: int | None = None, seed: int | None = None,
             p: float = 0.3) -> Graph:
    """Generate a graph of the named family on ``n`` vertices.

    ``lollipop`` is a ``k``-clique on ``0..k-1`` with a path ``k-1, k, ..., n-1``
    attached. ``random_connected`` is a uniform random spanning tree plus each
    remaining pair independently with probability ``p``; it needs ``seed``.
    """
    if family not in FAMILIES:
        raise InvalidParams(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidParams(f"n must be an integer >= 2, got {n!r}")
    if family == "path":
        edges = [(i, i + 1) for i in range(n - 1)]
    elif family == "cycle":
        if n < 3:
            raise InvalidParams("cycle needs n >= 3")
        edges = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    elif family == "complete":
        edges = list(combinations(range(n), 2))
    elif family == "star":
        edges = [(0, i) for i in range(1, n)]
    elif family == "lollipop":
        if k is None or not 3 <= k <= n:
            raise InvalidParams(f"lollipop needs 3 <= k <= n, got k={k}, n={n}")
        edges = list(combinations(range(k), 2)) + [(i, i + 1) for i in range(k - 1, n - 1)]
    else:
        if seed is None:
            raise InvalidParams("random_connected requires a seed")
        if not 0.0 <= p <= 1.0:
            raise InvalidParams(f"edge probability must lie in [0, 1], got {p}")
        rng = np.random.default_rng(seed)
        tree = set(_random_tree(n, rng))
        extra = [e for e in combinations(range(n), 2) if e not in tree]
        keep = rng.random(len(extra)) < p
        edges = sorted(tree | {e for e, kept in zip(extra, keep) if kept})
    return from_edges(n, edges)
