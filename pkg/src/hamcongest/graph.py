"""Undirected simple graphs, degree-condition classes and instance generators."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Graph",
    "GraphError",
    "GraphClassReport",
    "RkShape",
    "from_edge_list",
    "classify",
    "bfs_distances",
    "check_degree_sum_distance",
    "gen_two_cliques_matching",
    "gen_random_dirac",
    "gen_ore_non_dirac",
    "gen_rk_non_ore",
    "read_graph",
    "write_graph",
    "format_graph",
    "parse_graph",
]


class GraphError(ValueError):
    """Raised for malformed graph input or infeasible generator parameters."""


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph on vertices ``0..n-1``.

    ``adjacency[v]`` is the sorted tuple of neighbours of ``v``.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    _sets: tuple[frozenset[int], ...] = field(repr=False, compare=False, default=())

    def __post_init__(self) -> None:
        if not self._sets:
            object.__setattr__(self, "_sets", tuple(frozenset(a) for a in self.adjacency))

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def neighbor_set(self, v: int) -> frozenset[int]:
        return self._sets[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._sets[u]

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def min_degree(self) -> int:
        return min((len(a) for a in self.adjacency), default=0)

    def with_edge(self, u: int, v: int) -> "Graph":
        return from_edge_list(self.n, self.edges() + [(u, v)])


def from_edge_list(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Build a graph from an edge list; duplicates and orientation are collapsed."""
    if n < 0:
        raise GraphError(f"negative vertex count {n}")
    adj: list[set[int]] = [set() for _ in range(n)]
    for pair in edges:
        u, v = int(pair[0]), int(pair[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"vertex id out of range in edge ({u}, {v}) for n={n}")
        if u == v:
            raise GraphError(f"self-loop ({u}, {v})")
        adj[u].add(v)
        adj[v].add(u)
    return Graph(n, tuple(tuple(sorted(a)) for a in adj))


def bfs_distances(g: Graph, source: int) -> list[int]:
    """Hop distances from ``source``; unreachable vertices get -1."""
    dist = [-1] * g.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


@dataclass(frozen=True)
class GraphClassReport:
    is_dirac: bool
    is_ore: bool
    is_rk: bool
    min_degree: int
    diameter: int | None  # None when disconnected
    witness: tuple[int, int] | None = None
    witness_reason: str | None = None


def classify(g: Graph) -> GraphClassReport:
    """Exact Dirac / Ore / Rahman-Kaykobad membership.

    The witness names a vertex pair violating the strictest class that fails
    (RK when not RK, otherwise Ore, otherwise Dirac); it is ``None`` when the
    graph is Dirac.
    """
    n = g.n
    if n == 0:
        raise GraphError("empty graph")
    deg = [len(a) for a in g.adjacency]
    dists = [bfs_distances(g, s) for s in range(n)]
    connected = all(d >= 0 for d in dists[0])
    diameter = max(max(row) for row in dists) if connected else None
    min_deg = min(deg)

    is_dirac = 2 * min_deg >= n
    ore_witness = None
    rk_witness = None
    rk_reason = None
    for u in range(n):
        for v in range(u + 1, n):
            if g.has_edge(u, v):
                continue
            if ore_witness is None and deg[u] + deg[v] < n:
                ore_witness = (u, v)
            if rk_witness is None:
                if dists[u][v] < 0:
                    rk_witness, rk_reason = (u, v), "disconnected"
                elif deg[u] + deg[v] + dists[u][v] < n + 1:
                    rk_witness, rk_reason = (u, v), "rk-inequality"
    # n == 1 trivially satisfies everything; K_2 is Dirac (1 >= 2/2)
    is_ore = ore_witness is None
    is_rk = connected and rk_witness is None
    if not connected and rk_witness is None:
        rk_witness, rk_reason = (0, dists[0].index(-1)), "disconnected"

    if not is_rk:
        witness, reason = rk_witness, rk_reason
    elif not is_ore:
        witness, reason = ore_witness, "ore-inequality"
    elif not is_dirac:
        v = deg.index(min_deg)
        witness, reason = (v, v), "min-degree"
    else:
        witness, reason = None, None
    return GraphClassReport(is_dirac, is_ore, is_rk, min_deg, diameter, witness, reason)


def check_degree_sum_distance(g: Graph, u: int, v: int) -> bool:
    """True iff d(u) + d(v) >= n, the condition forcing distance at most 2."""
    if u == v:
        raise GraphError("u and v must differ")
    return g.degree(u) + g.degree(v) >= g.n


def gen_two_cliques_matching(n: int) -> Graph:
    """Two cliques on ``n/2`` vertices each, joined by the matching ``i -- i + n/2``."""
    if n % 2 or n < 4:
        raise GraphError(f"two-cliques graph needs even n >= 4, got {n}")
    h = n // 2
    edges = [(i, j) for i in range(h) for j in range(i + 1, h)]
    edges += [(h + i, h + j) for i in range(h) for j in range(i + 1, h)]
    edges += [(i, i + h) for i in range(h)]
    return from_edge_list(n, edges)


def gen_random_dirac(n: int, surplus: float, seed: int) -> Graph:
    """Random graph with minimum degree >= ceil(n/2).

    Edges appear independently with probability ``1/2 + surplus/2``; every
    vertex left below ``ceil(n/2)`` is then topped up with random non-neighbours.
    """
    if n < 3:
        raise GraphError("n must be at least 3")
    if not 0.0 <= surplus <= 1.0:
        raise GraphError("surplus must lie in [0, 1]")
    rng = np.random.default_rng([int(seed), n, 0xD1AC])
    p = 0.5 + surplus / 2
    coins = rng.random((n, n))
    adj = [set() for _ in range(n)]
    for u in range(n):
        for v in range(u + 1, n):
            if coins[u, v] < p:
                adj[u].add(v)
                adj[v].add(u)
    need = (n + 1) // 2
    for u in range(n):
        if len(adj[u]) >= need:
            continue
        candidates = np.array(sorted(set(range(n)) - adj[u] - {u}))
        extra = rng.choice(candidates, size=need - len(adj[u]), replace=False)
        for v in extra.tolist():
            adj[u].add(v)
            adj[v].add(u)
    return Graph(n, tuple(tuple(sorted(a)) for a in adj))


def _ore_local_ok(adj: list[set[int]], w: int, n: int) -> bool:
    dw = len(adj[w])
    return all(dw + len(adj[x]) >= n for x in range(n) if x != w and x not in adj[w])


def _permuted(n: int, edges: list[tuple[int, int]], rng: np.random.Generator) -> Graph:
    perm = rng.permutation(n).tolist()
    return from_edge_list(n, [(perm[u], perm[v]) for u, v in edges])


def gen_ore_non_dirac(n: int, seed: int, thinning: float = 0.3, max_tries: int = 50) -> Graph:
    """Ore graph that is not Dirac: a thinned clique on n-1 vertices plus a light vertex.

    The light vertex gets ``k`` neighbours with ``2 <= k < n/2``; clique edges are
    then removed at random while the Ore condition survives.
    """
    if n < 5:
        raise GraphError("an Ore non-Dirac graph needs n >= 5")
    rng = np.random.default_rng([int(seed), n, 0x0E])
    for _ in range(max_tries):
        k = int(rng.integers(2, (n + 1) // 2))  # k < n/2
        core = list(range(1, n))
        edges = {(u, v) for i, u in enumerate(core) for v in core[i + 1:]}
        light_nbrs = rng.choice(core, size=k, replace=False).tolist()
        edges |= {(0, v) for v in light_nbrs}
        adj = [set() for _ in range(n)]
        for u, v in edges:
            adj[u].add(v)
            adj[v].add(u)
        order = sorted(e for e in edges if e[0] != 0)
        for idx in rng.permutation(len(order)).tolist():
            if rng.random() >= thinning:
                continue
            u, v = order[idx]
            adj[u].discard(v)
            adj[v].discard(u)
            if not (_ore_local_ok(adj, u, n) and _ore_local_ok(adj, v, n)):
                adj[u].add(v)
                adj[v].add(u)
        edges = {(u, v) for u in range(n) for v in adj[u] if u < v}
        g = _permuted(n, sorted(edges), rng)
        rep = classify(g)
        if rep.is_ore and not rep.is_dirac:
            return g
    raise GraphError("could not generate an Ore non-Dirac graph")


@dataclass(frozen=True)
class RkShape:
    """Layer sizes around the light vertex v_star (which is not counted)."""

    a: int
    b: int
    c: int
    d: int = 0
    drop: float = 0.3  # probability of trying to delete an optional A-B / B-B edge

    @property
    def n(self) -> int:
        return 1 + self.a + self.b + self.c + self.d


def gen_rk_non_ore(shape: RkShape, seed: int, max_tries: int = 100) -> Graph:
    """RK graph that is not Ore, layered by distance from a light vertex v_star.

    Without a D layer: v_star + A is a clique, A-B and B-B edges are random, B-C is
    complete and C is a clique. With a D layer (|B| = 1 forced): A-B complete,
    C-D complete and C, D cliques. Candidates are verified with :func:`classify`
    and resampled until RK holds and Ore fails.
    """
    a, b, c, d = shape.a, shape.b, shape.c, shape.d
    if min(a, b) < 1 or c < 0 or d < 0:
        raise GraphError(f"infeasible shape {shape}")
    if d and (b != 1 or c < 1):
        raise GraphError("a non-empty D layer needs |B| = 1 and |C| >= 1")
    n = shape.n
    rng = np.random.default_rng([int(seed), a, b, c, d, 0x2C])
    vs = 0
    A = list(range(1, 1 + a))
    B = list(range(1 + a, 1 + a + b))
    C = list(range(1 + a + b, 1 + a + b + c))
    D = list(range(1 + a + b + c, n))

    def clique(xs):
        return {(u, v) for i, u in enumerate(xs) for v in xs[i + 1:]}

    def biclique(xs, ys):
        return {(min(u, v), max(u, v)) for u in xs for v in ys}

    fixed = clique([vs] + A) | biclique(B, C) | clique(C) | biclique(C, D) | clique(D)
    optional = sorted(biclique(A, B) | clique(B))
    for _ in range(max_tries):
        edges = set(fixed) | set(optional)
        if not d:
            for e in optional:
                if rng.random() < shape.drop:
                    edges.discard(e)
                    if not _layered_rk_ok(n, edges, A, B):
                        edges.add(e)
        g = _permuted(n, sorted(edges), rng)
        rep = classify(g)
        if rep.is_rk and not rep.is_ore:
            return g
    raise GraphError(f"shape {shape} produced no RK non-Ore graph within {max_tries} tries")


def _layered_rk_ok(n: int, edges: set, A: list[int], B: list[int]) -> bool:
    g = from_edge_list(n, sorted(edges))
    dist = bfs_distances(g, 0)
    # every A vertex keeps a B neighbour and every B vertex an A neighbour
    if any(dist[x] != 1 for x in A) or any(dist[x] != 2 for x in B):
        return False
    return classify(g).is_rk


def format_graph(g: Graph) -> str:
    edges = g.edges()
    lines = [f"{g.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    tokens = text.split()
    if len(tokens) < 2:
        raise GraphError("graph file needs a header line 'n m'")
    n, m = int(tokens[0]), int(tokens[1])
    body = tokens[2:]
    if len(body) != 2 * m:
        raise GraphError(f"expected {m} edges, found {len(body) / 2:g}")
    pairs = [(int(body[2 * i]), int(body[2 * i + 1])) for i in range(m)]
    return from_edge_list(n, pairs)


def read_graph(path: str | Path) -> Graph:
    return parse_graph(Path(path).read_text())


def write_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g))


def ceil_log2(n: int) -> int:
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1
