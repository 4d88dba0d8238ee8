"""Reusable vertex-program phases: election, global tree, matching, digests, path trees.

Each phase is a small program object run to quiescence by
:meth:`RoundEngine.run`. Phases read and write only ``ctx.state``.
"""

from __future__ import annotations

from typing import Callable, Optional

from .congest import Context, Kind, Message

Value = tuple  # (ids, paths, flags)


class ProtocolError(RuntimeError):
    """The distributed protocol hit a state its preconditions rule out."""


# ---------------------------------------------------------------------------
# leader election and the global BFS tree


class MinIdElection:
    """Flood the minimum id; every vertex ends with ``g_root`` set."""

    def step(self, ctx: Context) -> None:
        st = ctx.state
        if ctx.phase_round == 0:
            st.g_root = ctx.vertex
            ctx.broadcast(Message(Kind.ELECT, (ctx.vertex,)))
            ctx.halt()
            return
        best = min(m.ids[0] for _, m in ctx.inbox)
        if best < st.g_root:
            st.g_root = best
            ctx.broadcast(Message(Kind.ELECT, (best,)))
        ctx.halt()


class GlobalTreeBFS:
    """BFS tree from ``g_root``; each vertex adopts the smallest-id neighbour one layer up.

    ``members`` optionally restricts the tree to vertices for which it returns True.
    """

    def __init__(self, members: Callable | None = None):
        self.members = members

    def step(self, ctx: Context) -> None:
        st = ctx.state
        sc = st.scratch
        if ctx.phase_round == 0:
            st.g_parent = None
            st.g_children = set()
            sc["g_depth"] = None
            inside = self.members is None or self.members(st)
            sc["g_in"] = inside
            if inside and ctx.vertex == st.g_root:
                sc["g_depth"] = 0
                ctx.broadcast(Message(Kind.BFS, (0,)))
            ctx.halt()
            return
        for sender, msg in ctx.inbox:
            if msg.kind == Kind.GT_JOIN:
                st.g_children.add(sender)
        if sc["g_in"] and sc["g_depth"] is None:
            offers = [(m.ids[0], s) for s, m in ctx.inbox if m.kind == Kind.BFS]
            if offers:
                depth, parent = min(offers)
                sc["g_depth"] = depth + 1
                st.g_parent = parent
                st.g_adjacent_root = parent == st.g_root
                ctx.post(parent, Message(Kind.GT_JOIN))
                for u in ctx.neighbors:
                    if u != parent:
                        ctx.post(u, Message(Kind.BFS, (depth + 1,)))
        ctx.halt()


# ---------------------------------------------------------------------------
# randomized maximal matching


class MaximalMatching:
    """Propose/accept maximal matching on the edges ``active(state, nbr)`` allows.

    Cycles of three rounds: unmatched vertices flip a coin, proposers pick a
    uniform random candidate, acceptors take the smallest proposer, and newly
    matched vertices announce themselves to all neighbours. The result lands
    in ``scratch[key]`` (partner or None); ``scratch[key + '_nbrs']`` holds the
    neighbours known to be matched.
    """

    def __init__(self, key: str, active: Callable[[object, int], bool], cap_cycles: int = 400):
        self.key = key
        self.active = active
        self.cap_cycles = cap_cycles

    def step(self, ctx: Context) -> None:
        st = ctx.state
        sc = st.scratch
        key = self.key
        if ctx.phase_round == 0:
            sc[key] = None
            sc[key + "_nbrs"] = set()
            sc[key + "_cand"] = {u for u in ctx.neighbors if self.active(st, u)}
            sc[key + "_proposed"] = None
            sc[key + "_told"] = False
        matched_nbrs = sc[key + "_nbrs"]
        cand = sc[key + "_cand"]
        for sender, msg in ctx.inbox:
            if msg.kind == Kind.MATCHED:
                matched_nbrs.add(sender)
                cand.discard(sender)
        phase = ctx.phase_round % 3
        if ctx.phase_round // 3 > self.cap_cycles:
            raise ProtocolError(f"matching did not converge within {self.cap_cycles} cycles")
        if sc[key] is not None and phase != 2:
            ctx.halt()
            return
        if phase == 0:
            sc[key + "_proposed"] = None
            if not cand:
                ctx.halt()
                return
            rng = ctx.rng
            if rng.random() < 0.5:
                choice = sorted(cand)[int(rng.integers(len(cand)))]
                sc[key + "_proposed"] = choice
                ctx.send(choice, Message(Kind.PROPOSE))
        elif phase == 1:
            if sc[key + "_proposed"] is None:
                proposers = [s for s, m in ctx.inbox if m.kind == Kind.PROPOSE and s in cand]
                if proposers:
                    partner = min(proposers)
                    sc[key] = partner
                    ctx.send(partner, Message(Kind.ACCEPT))
        else:
            if sc[key] is not None and sc[key + "_told"]:
                ctx.halt()
                return
            for sender, msg in ctx.inbox:
                if msg.kind == Kind.ACCEPT and sender == sc[key + "_proposed"]:
                    sc[key] = sender
        if phase == 2 and sc[key] is not None:
            sc[key + "_told"] = True
            ctx.broadcast(Message(Kind.MATCHED))
            ctx.halt()


# ---------------------------------------------------------------------------
# neighbour digests


class DigestRefresh:
    """Vertices whose (path id, endpoint kind, eligibility) changed tell every neighbour."""

    def __init__(self, force: bool = False):
        self.force = force

    def step(self, ctx: Context) -> None:
        st = ctx.state
        if ctx.phase_round == 0:
            entry = st.digest_entry()
            if self.force or entry != st.published:
                st.published = entry
                ctx.broadcast(Message(Kind.DIGEST, (), (entry[0],), entry[1] | (entry[2] << 2)))
        else:
            for sender, msg in ctx.inbox:
                st.digest[sender] = (msg.paths[0], msg.flags & 3, bool(msg.flags & 4))
        ctx.halt()


# ---------------------------------------------------------------------------
# per-path spanning trees


class PathTreeMaintenance:
    """Re-attach vertices whose path leader changed to the new leader's tree.

    A vertex adjacent to its leader becomes a direct child; otherwise it asks
    all neighbours whether they are adjacent to the leader and picks the
    smallest such neighbour as relay. With ``fallback`` a vertex with no such
    neighbour hangs below an attached path neighbour instead (needed outside
    Dirac graphs). Leaving the old tree is announced so relays can drop out.
    """

    def __init__(self, fallback: bool = False):
        self.fallback = fallback

    def _attach(self, ctx: Context, parent: int) -> None:
        st = ctx.state
        r = st.path_id
        st.tree_up[r] = parent
        st.tree_root = r
        ctx.post(parent, Message(Kind.TREE_JOIN, (), (r,)))
        if self.fallback:
            for asker in st.scratch.pop("pt_askers", ()):
                ctx.post(asker, Message(Kind.TREE_ATTACHED, (), (r,)))

    def step(self, ctx: Context) -> None:
        st = ctx.state
        sc = st.scratch
        v = ctx.vertex
        if ctx.phase_round == 0:
            sc["pt_waiting"] = None
            sc["pt_askers"] = []
            if st.tree_root != st.path_id:
                old = st.tree_root
                if old is not None and old in st.tree_up and old != st.path_id:
                    ctx.post(st.tree_up.pop(old), Message(Kind.TREE_LEAVE, (), (old,)))
                r = st.path_id
                if r == v:
                    st.tree_up.pop(r, None)
                    st.tree_root = r
                elif r in ctx.neighbor_set:
                    self._attach(ctx, r)
                else:
                    st.tree_up.pop(r, None)
                    sc["pt_waiting"] = {"replies": 0, "yes": []}
                    ctx.broadcast(Message(Kind.TREE_QUERY, (), (r,)))
            ctx.halt()
            return

        for sender, msg in ctx.inbox:
            k = msg.kind
            if k == Kind.TREE_QUERY:
                r = msg.paths[0]
                ctx.post(sender, Message(Kind.TREE_REPLY, (), (r,), int(r in ctx.neighbor_set)))
            elif k == Kind.TREE_REPLY:
                w = sc["pt_waiting"]
                w["replies"] += 1
                if msg.flags:
                    w["yes"].append(sender)
            elif k == Kind.TREE_JOIN:
                r = msg.paths[0]
                st.tree_children.setdefault(r, set()).add(sender)
                if r != st.path_id and r not in st.tree_up:
                    st.tree_up[r] = r
                    ctx.post(r, Message(Kind.RELAY_JOIN, (), (r,)))
            elif k == Kind.RELAY_JOIN:
                st.tree_children.setdefault(msg.paths[0], set()).add(sender)
            elif k in (Kind.TREE_LEAVE, Kind.RELAY_LEAVE):
                r = msg.paths[0]
                kids = st.tree_children.get(r)
                if kids is not None:
                    kids.discard(sender)
                    if not kids:
                        del st.tree_children[r]
                        if k == Kind.TREE_LEAVE and r != st.path_id and st.tree_up.get(r) == r:
                            del st.tree_up[r]
                            ctx.post(r, Message(Kind.RELAY_LEAVE, (), (r,)))
            elif k == Kind.TREE_ASK:
                if st.tree_root == st.path_id and msg.paths[0] == st.path_id:
                    ctx.post(sender, Message(Kind.TREE_ATTACHED, (), (st.path_id,)))
                else:
                    sc["pt_askers"].append(sender)
            elif k == Kind.TREE_ATTACHED:
                if st.tree_root != st.path_id and msg.paths[0] == st.path_id:
                    sc["pt_waiting"] = None
                    self._attach(ctx, sender)

        w = sc["pt_waiting"]
        if w is not None and w["replies"] == ctx.degree:
            sc["pt_waiting"] = None
            if w["yes"]:
                self._attach(ctx, min(w["yes"]))
            elif self.fallback:
                sc["pt_waiting"] = {"replies": -1, "yes": []}
                for u in (st.pred, st.succ):
                    if u is not None:
                        ctx.post(u, Message(Kind.TREE_ASK, (), (st.path_id,)))
            else:
                raise ProtocolError(
                    f"vertex {ctx.vertex} has no common neighbour with its leader {st.path_id}"
                )
        ctx.halt()


class TreeAggregate:
    """Convergecast a value to each path leader, let it decide, broadcast the decision.

    ``local(ctx)`` gives a member's contribution (or None), ``combine``
    merges two non-None values, ``decide(ctx, acc)`` runs at the leader and
    returns the payload to broadcast (or None for no broadcast), and
    ``apply(state, payload)`` runs at every member that receives it, the
    leader included. Values and payloads are ``(ids, paths, flags)`` with at
    most three ids, one path id and seven flag bits.
    """

    def __init__(
        self,
        local: Callable[[Context], Optional[Value]],
        combine: Callable[[Value, Value], Value],
        decide: Callable[[Context, Optional[Value]], Optional[Value]],
        apply: Callable[[object, Value], None],
    ):
        self.local = local
        self.combine = combine
        self.decide = decide
        self.apply = apply

    def _merge(self, a, b):
        if a is None:
            return b
        if b is None:
            return a
        return self.combine(a, b)

    def _report(self, ctx: Context, key: int, acc) -> None:
        st = ctx.state
        if key == st.scratch["ta_pid"] and ctx.vertex == key:
            payload = self.decide(ctx, acc)
            if payload is not None:
                self.apply(st, payload)
                ids, paths, flags = payload
                for c in sorted(st.tree_children.get(key, ())):
                    ctx.post(c, Message(Kind.DOWN, ids, (key,) + paths, flags))
            return
        parent = st.tree_up[key]
        if acc is None:
            ctx.post(parent, Message(Kind.UP_NONE, (), (key,)))
        else:
            ids, paths, flags = acc
            ctx.post(parent, Message(Kind.UP, ids, (key,) + paths, flags))

    def step(self, ctx: Context) -> None:
        st = ctx.state
        sc = st.scratch
        if ctx.phase_round == 0:
            # apply may rename the path; membership is fixed at the start
            sc["ta_pid"] = st.path_id
            pending = {}
            keys = set(st.tree_up)
            if st.tree_root == st.path_id:
                keys.add(st.path_id)
            for key in sorted(keys):
                acc = self.local(ctx) if key == st.path_id else None
                expect = len(st.tree_children.get(key, ()))
                pending[key] = [expect, acc]
            sc["ta"] = pending
            for key in sorted(pending):
                if pending[key][0] == 0:
                    self._report(ctx, key, pending.pop(key)[1])
            ctx.halt()
            return
        pending = sc["ta"]
        for sender, msg in ctx.inbox:
            key = msg.paths[0]
            if msg.kind == Kind.DOWN:
                payload = (msg.ids, msg.paths[1:], msg.flags)
                if key == sc["ta_pid"]:
                    self.apply(st, payload)
                for c in sorted(st.tree_children.get(key, ())):
                    ctx.post(c, Message(Kind.DOWN, msg.ids, msg.paths, msg.flags))
                continue
            slot = pending[key]
            slot[0] -= 1
            if msg.kind == Kind.UP:
                slot[1] = self._merge(slot[1], (msg.ids, msg.paths[1:], msg.flags))
            if slot[0] == 0:
                self._report(ctx, key, pending.pop(key)[1])
        ctx.halt()


def min_combine(a: Value, b: Value) -> Value:
    return min(a, b)
