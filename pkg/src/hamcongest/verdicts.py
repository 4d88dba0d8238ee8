"""Distributed cycled and sociable verdicts for an arbitrary path cover.

Used to cross-check the vertex programs against the sequential predicates in
:mod:`hamcongest.oracle`: load a cover into fresh vertex states, build the
per-path trees, then let every leader decide both predicates.
"""

from __future__ import annotations

from typing import Sequence

from . import iteration as it
from .graph import Graph
from .pathcover import ProtocolRun
from .phases import TreeAggregate


def _soc_local(ctx):
    st = ctx.state
    pid = st.path_id
    inside = sum(1 for u in ctx.neighbor_set if st.digest.get(u, (None,))[0] == pid)
    dh = inside if ctx.vertex == st.head else 0
    dt = inside if ctx.vertex == st.tail else 0
    return ((1, dh, dt), (), 0)


def _soc_combine(a, b):
    return (tuple(x + y for x, y in zip(a[0], b[0])), (), 0)


def _soc_decide(ctx, acc):
    size, dh, dt = acc[0]
    return ((), (), int(dh + dt + 1 <= size))


def _soc_apply(st, payload):
    st.scratch["sociable"] = bool(payload[2])


def sociable_broadcast() -> TreeAggregate:
    """Leaders sum path size and the endpoints' in-path degrees, then decide sociability."""
    return TreeAggregate(_soc_local, _soc_combine, _soc_decide, _soc_apply)


class _CoverRun(ProtocolRun):
    tree_fallback = True


def distributed_verdicts(g: Graph, cover: Sequence[Sequence[int]], seed: int = 0) -> list[tuple[bool, bool]]:
    """(cycled, sociable) per path of ``cover``, as decided by the path leaders."""
    pr = _CoverRun(g, seed)
    for p in cover:
        leader = min(p)
        for i, v in enumerate(p):
            st = pr.states[v]
            st.path_id = leader
            st.pred = p[i - 1] if i else None
            st.succ = p[i + 1] if i + 1 < len(p) else None
            st.head, st.tail = p[0], p[-1]
    pr.refresh(force=True)
    pr.phase(it.head_tail_broadcast())
    pr.phase(it.SuccFlag())
    pr.phase(it.witness_broadcast())
    pr.phase(sociable_broadcast())
    out = []
    for p in cover:
        sc = pr.states[min(p)].scratch
        out.append((sc["cycled"], sc["sociable"]))
    return out
