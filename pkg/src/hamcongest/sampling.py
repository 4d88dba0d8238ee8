"""Random paths and path covers for property checks."""

from __future__ import annotations

import numpy as np

from .graph import Graph


def random_path(g: Graph, rng: np.random.Generator, max_len: int | None = None) -> list[int]:
    """Self-avoiding random walk from a random start, stopped at a random length."""
    limit = g.n if max_len is None else max_len
    want = int(rng.integers(1, limit + 1))
    path = [int(rng.integers(g.n))]
    seen = {path[0]}
    while len(path) < want:
        options = [u for u in g.neighbors(path[-1]) if u not in seen]
        if not options:
            break
        u = options[int(rng.integers(len(options)))]
        path.append(u)
        seen.add(u)
    return path


def random_cover(g: Graph, rng: np.random.Generator, stop: float = 0.2,
                 min_size: int = 1) -> list[list[int]]:
    """Greedy cover by random walks; each walk stops early with probability ``stop``.

    With ``min_size = 2`` stray singletons are glued onto a neighbouring
    path end when possible and dropped from the result otherwise, so the
    returned paths may no longer cover every vertex.
    """
    left = set(range(g.n))
    cover: list[list[int]] = []
    for s in rng.permutation(g.n):
        s = int(s)
        if s not in left:
            continue
        p = [s]
        left.discard(s)
        while True:
            options = [u for u in g.neighbors(p[-1]) if u in left]
            if not options or (len(p) >= min_size and rng.random() < stop):
                break
            u = options[int(rng.integers(len(options)))]
            p.append(u)
            left.discard(u)
        cover.append(p)
    if min_size > 1:
        cover = _absorb_short(g, cover, min_size)
    return cover


def _absorb_short(g: Graph, cover: list[list[int]], min_size: int) -> list[list[int]]:
    long = [p for p in cover if len(p) >= min_size]
    for p in cover:
        if len(p) >= min_size:
            continue
        for v in p:
            for q in long:
                if g.has_edge(q[-1], v):
                    q.append(v)
                    break
                if g.has_edge(q[0], v):
                    q.insert(0, v)
                    break
    return long
