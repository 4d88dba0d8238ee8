"""Sequential ground truth: brute-force search, path predicates, merge counts, verifiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .graph import Graph

__all__ = [
    "PathCoverView",
    "MergeCount",
    "OracleError",
    "brute_force_hamiltonian",
    "is_sociable_ref",
    "is_cycled_ref",
    "merge_count",
    "merge_pair_count",
    "merge_lower_bound",
    "good_paths",
    "in_a_set",
    "verify_hamiltonian",
    "verify_cover",
    "ORACLE_MAX_N",
]

ORACLE_MAX_N = 12


class OracleError(ValueError):
    pass


@dataclass
class PathCoverView:
    """Global snapshot of the distributed cover; ``ids[i]`` is the path id of ``paths[i]``."""

    paths: list[tuple[int, ...]]
    ids: list[int] = field(default_factory=list)

    @classmethod
    def from_states(cls, states) -> "PathCoverView":
        paths, ids = [], []
        for s in states:
            if s.pred is None:
                seq = [s.vertex]
                cur = s.succ
                while cur is not None:
                    seq.append(cur)
                    if len(seq) > len(states):
                        raise OracleError("successor pointers loop")
                    cur = states[cur].succ
                paths.append(tuple(seq))
                ids.append(s.path_id)
        return cls(paths, ids)

    @staticmethod
    def cycle_from_states(states) -> list[int]:
        seq = [0]
        cur = states[0].succ
        while cur != 0:
            if cur is None or len(seq) > len(states):
                raise OracleError("successor pointers do not form a cycle")
            seq.append(cur)
            cur = states[cur].succ
        return seq

    @property
    def sizes(self) -> list[int]:
        return [len(p) for p in self.paths]


@dataclass
class MergeCount:
    pair: dict[tuple[int, int], int]
    per_path: list[int]


def _check_path(g: Graph, path: Sequence[int]) -> None:
    if not path or len(set(path)) != len(path):
        raise OracleError(f"invalid path {tuple(path)}")
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            raise OracleError(f"{a}-{b} is not an edge")


def _d_in(g: Graph, v: int, members: set[int]) -> int:
    return len(g.neighbor_set(v) & members)


def is_sociable_ref(g: Graph, path: Sequence[int]) -> bool:
    _check_path(g, path)
    members = set(path)
    return _d_in(g, path[0], members) + _d_in(g, path[-1], members) + 1 <= len(path)


def is_cycled_ref(g: Graph, path: Sequence[int]) -> bool:
    _check_path(g, path)
    if len(path) == 1:
        return True
    first, last = path[0], path[-1]
    if g.has_edge(first, last):
        return True
    return any(
        g.has_edge(first, path[i + 1]) and g.has_edge(path[i], last) for i in range(len(path) - 1)
    )


def merge_pair_count(g: Graph, p: Sequence[int], q: Sequence[int]) -> int:
    """Q edges along which P merges (either orientation, once per edge) plus usable Q endpoints."""
    u, v = p[0], p[-1]
    nu, nv = g.neighbor_set(u), g.neighbor_set(v)
    count = 0
    for a, b in zip(q, q[1:]):
        if (a in nu and b in nv) or (b in nu and a in nv):
            count += 1
    for end in {q[0], q[-1]}:
        if end in nu or end in nv:
            count += 1
    return count


def merge_lower_bound(g: Graph, p: Sequence[int], q: Sequence[int]) -> int:
    qs = set(q)
    return _d_in(g, p[0], qs) + _d_in(g, p[-1], qs) - len(q) + 1


def merge_count(g: Graph, cover: Sequence[Sequence[int]]) -> MergeCount:
    pair = {}
    per = [0] * len(cover)
    for i, p in enumerate(cover):
        for j, q in enumerate(cover):
            if i != j:
                c = merge_pair_count(g, p, q)
                pair[(i, j)] = c
                per[i] += c
    return MergeCount(pair, per)


def in_a_set(g: Graph, cover: Sequence[Sequence[int]], i: int) -> bool:
    p = cover[i]
    ends = g.neighbor_set(p[0]) | g.neighbor_set(p[-1])
    return any(
        j != i and len(q) >= len(p) and not ends.intersection(q) for j, q in enumerate(cover)
    )


def good_paths(g: Graph, cover: Sequence[Sequence[int]]) -> set[int]:
    """Indices of paths that are sociable or have a no-shorter path untouched by their endpoints."""
    return {i for i, p in enumerate(cover) if is_sociable_ref(g, p) or in_a_set(g, cover, i)}


def verify_hamiltonian(g: Graph, seq: Sequence[int], as_cycle: bool) -> tuple[bool, str]:
    """Return (ok, first violation or '')."""
    if len(seq) != g.n or sorted(seq) != list(range(g.n)):
        return False, "not a permutation of the vertices"
    for a, b in zip(seq, seq[1:]):
        if not g.has_edge(a, b):
            return False, f"missing edge {a}-{b}"
    if as_cycle and g.n > 1 and not g.has_edge(seq[-1], seq[0]):
        return False, f"missing closing edge {seq[-1]}-{seq[0]}"
    return True, ""


def verify_cover(g: Graph, view: PathCoverView | Sequence[Sequence[int]]) -> tuple[bool, str]:
    paths = view.paths if isinstance(view, PathCoverView) else view
    seen: set[int] = set()
    for p in paths:
        for v in p:
            if v in seen:
                return False, f"vertex {v} on two paths"
            seen.add(v)
        for a, b in zip(p, p[1:]):
            if not g.has_edge(a, b):
                return False, f"missing edge {a}-{b}"
    if len(seen) != g.n:
        return False, "cover misses vertices"
    return True, ""


def brute_force_hamiltonian(g: Graph, want_cycle: bool, start_order: Sequence[int] | None = None):
    """Exhaustive backtracking; returns a vertex sequence or None. ``start_order`` permutes the search."""
    n = g.n
    if n > ORACLE_MAX_N:
        raise OracleError(f"brute force is capped at n <= {ORACLE_MAX_N}")
    if n == 0:
        return None
    order = list(start_order) if start_order is not None else list(range(n))
    starts = order[:1] if want_cycle else order
    for s in starts:
        seq = [s]
        used = [False] * n
        used[s] = True
        if _extend(g, seq, used, want_cycle, order):
            return seq
    return None


def _extend(g: Graph, seq: list[int], used: list[bool], want_cycle: bool, order) -> bool:
    if len(seq) == g.n:
        return not want_cycle or g.n == 1 or g.has_edge(seq[-1], seq[0])
    nbrs = g.neighbor_set(seq[-1])
    for w in order:
        if not used[w] and w in nbrs:
            used[w] = True
            seq.append(w)
            if _extend(g, seq, used, want_cycle, order):
                return True
            seq.pop()
            used[w] = False
    return False
