"""Initial path cover from two maximal matchings, and the global pairing phase."""

from __future__ import annotations

from .congest import Context, Kind, Message
from .phases import MaximalMatching, ProtocolError


def first_matching() -> MaximalMatching:
    return MaximalMatching("F", lambda st, u: True)


def second_matching() -> MaximalMatching:
    # drop edges with both ends already matched by the first matching
    def active(st, u):
        return st.scratch["F"] is None or u not in st.scratch["F_nbrs"]

    return MaximalMatching("S", active)


class FormPaths:
    """Turn F and S into oriented paths ``s_a -> a -> b -> s_b`` (for an F edge a < b).

    The two F partners swap the minimum and the outer endpoint of their side,
    then tell their S partner. A vertex covered by neither matching becomes a
    singleton path when ``allow_singletons`` is set and is a cover violation
    otherwise.
    """

    def __init__(self, allow_singletons: bool = False):
        self.allow_singletons = allow_singletons

    def step(self, ctx: Context) -> None:
        st = ctx.state
        sc = st.scratch
        v = ctx.vertex
        f, s = sc["F"], sc["S"]
        if ctx.phase_round == 0:
            st.pred = st.succ = None
            if f is not None:
                side_min = min(v, s) if s is not None else v
                outer = s if s is not None else v
                ctx.send(f, Message(Kind.SIDE_MIN, (side_min, outer)))
            elif s is None:
                if not self.allow_singletons:
                    raise ProtocolError(f"vertex {v} is in neither matching: not a Dirac input")
                st.path_id = st.head = st.tail = v
            ctx.halt()
            return
        for sender, msg in ctx.inbox:
            if msg.kind == Kind.SIDE_MIN:
                mine = min(v, s) if s is not None else v
                outer = s if s is not None else v
                leader = min(mine, msg.ids[0])
                first = v < f
                st.path_id = leader
                st.head, st.tail = (outer, msg.ids[1]) if first else (msg.ids[1], outer)
                if first:
                    st.succ, st.pred = f, s
                else:
                    st.pred, st.succ = f, s
                if s is not None:
                    ctx.send(s, Message(Kind.PATH_INFO, (leader, st.head, st.tail), (), int(first)))
            elif msg.kind == Kind.PATH_INFO:
                st.path_id, st.head, st.tail = msg.ids
                if msg.flags:
                    st.succ = sender
                else:
                    st.pred = sender
        ctx.halt()


class PairAndCount:
    """Pair path leaders over the global tree and decide whether one path is left.

    Every node pairs the leader ids it holds (its own, plus leftovers
    reported by its children) in ascending order and forwards at most one
    leftover to its parent, along with a path count saturated at 3. Pair
    decisions travel back to the leaders along the recorded routes. The root
    then broadcasts ``done = (count <= 1)`` and ``two = (count == 2)`` down
    the tree.
    Vertices outside the global tree (``g_in`` false) take no part.
    """

    def _finish(self, ctx: Context) -> None:
        st = ctx.state
        sc = st.scratch
        ids = sorted(sc["pc_ids"])
        route = sc["pc_route"]
        for i in range(0, len(ids) - 1, 2):
            a, b = ids[i], ids[i + 1]
            self._deliver(ctx, a, b, route)
            self._deliver(ctx, b, a, route)
        left = ids[-1] if len(ids) % 2 else None
        count = min(3, sc["pc_count"])
        if st.g_parent is None:
            flags = int(count <= 1) | (int(count == 2) << 1)
            self._verdict(st, flags)
            for c in sorted(st.g_children):
                ctx.post(c, Message(Kind.DOWN, (), (), flags))
        else:
            up = (left,) if left is not None else ()
            ctx.post(st.g_parent, Message(Kind.PAIR_UP, up, (), count))

    @staticmethod
    def _verdict(st, flags: int) -> None:
        st.verdict["done"] = bool(flags & 1)
        st.verdict["two"] = bool(flags & 2)

    def _deliver(self, ctx: Context, target: int, partner: int, route: dict) -> None:
        st = ctx.state
        if target == ctx.vertex:
            st.partner_path = partner
        else:
            ctx.post(route[target], Message(Kind.PAIR_DOWN, (target, partner)))

    def step(self, ctx: Context) -> None:
        st = ctx.state
        sc = st.scratch
        v = ctx.vertex
        if ctx.phase_round == 0:
            st.partner_path = None
            st.verdict.pop("done", None)
            st.verdict.pop("two", None)
            if not sc.get("g_in", True):
                ctx.halt()
                return
            own = st.path_id == v
            sc["pc_ids"] = [v] if own else []
            sc["pc_count"] = int(own)
            sc["pc_route"] = {}
            sc["pc_wait"] = len(st.g_children)
            if sc["pc_wait"] == 0:
                self._finish(ctx)
            ctx.halt()
            return
        for sender, msg in ctx.inbox:
            if msg.kind == Kind.PAIR_UP:
                sc["pc_wait"] -= 1
                sc["pc_count"] += msg.flags
                for x in msg.ids:
                    sc["pc_ids"].append(x)
                    sc["pc_route"][x] = sender
                if sc["pc_wait"] == 0:
                    self._finish(ctx)
            elif msg.kind == Kind.PAIR_DOWN:
                target, partner = msg.ids
                self._deliver(ctx, target, partner, sc["pc_route"])
            elif msg.kind == Kind.DOWN:
                self._verdict(st, msg.flags)
                for c in sorted(st.g_children):
                    ctx.post(c, Message(Kind.DOWN, (), (), msg.flags))
        ctx.halt()
