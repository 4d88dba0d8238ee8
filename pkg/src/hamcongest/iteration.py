"""Vertex programs for one merge iteration of the path-cover protocol.

Aggregations run over the per-path trees through :class:`TreeAggregate`;
everything else is a small single-purpose program. The orchestration order
lives in :mod:`hamcongest.pathcover`.
"""

from __future__ import annotations

from .congest import Context, Kind, Message
from .phases import TreeAggregate
from .state import INTERIOR, SINGLETON

# flag bits of the witness/edge aggregate
_HAS_WIT, _CLOSURE, _HAS_EDGE = 1, 2, 4


# ---------------------------------------------------------------------------
# head, tail and partner


def _ht_local(ctx):
    st = ctx.state
    mask = (st.pred is None) | ((st.succ is None) << 1)
    if not mask:
        return None
    heavy = st.heavy
    return ((st.vertex, st.vertex), (), mask | ((mask & 1) * heavy << 2) | ((mask >> 1) * heavy << 3))


def _ht_combine(a, b):
    h = a[0][0] if a[2] & 1 else b[0][0]
    t = a[0][1] if a[2] & 2 else b[0][1]
    return ((h, t), (), (a[2] | b[2]))


def _ht_decide(ctx, acc):
    st = ctx.state
    if acc is None or acc[2] & 3 != 3:
        raise AssertionError(f"path {st.path_id} lost an endpoint")
    partner = st.partner_path
    paths = (partner,) if partner is not None else ()
    return (acc[0], paths, acc[2] >> 2)


def _ht_apply(st, payload):
    ids, paths, flags = payload
    st.head, st.tail = ids
    st.partner_path = paths[0] if paths else None
    # only paths whose endpoints are both heavy may be reserved for, unless two paths remain
    st.eligible = flags == 3 or bool(st.verdict.get("two"))


def head_tail_broadcast() -> TreeAggregate:
    """Leaders learn head and tail and broadcast them with the partner id."""
    return TreeAggregate(_ht_local, _ht_combine, _ht_decide, _ht_apply)


class SuccFlag:
    """Each vertex tells its predecessor whether it is adjacent to the head."""

    def step(self, ctx: Context) -> None:
        st = ctx.state
        if ctx.phase_round == 0:
            st.scratch["succ_sees_head"] = False
            if st.pred is not None:
                ctx.send(st.pred, Message(Kind.SUCC_FLAG, (), (), int(st.head in ctx.neighbor_set)))
        else:
            for _, msg in ctx.inbox:
                st.scratch["succ_sees_head"] = bool(msg.flags)
        ctx.halt()


# ---------------------------------------------------------------------------
# cycled witness, connecting edge and coin


def _wit_local(ctx):
    st = ctx.state
    v = st.vertex
    adj = ctx.neighbor_set
    flags = 0
    wit = v
    if st.head == st.tail:
        flags = _HAS_WIT | _CLOSURE
    elif v in (st.head, st.tail) and (st.tail if v == st.head else st.head) in adj:
        flags = _HAS_WIT | _CLOSURE
        wit = st.head
    elif st.succ is not None and v != st.head and st.scratch["succ_sees_head"] and st.tail in adj:
        flags = _HAS_WIT
    edge = None
    if st.partner_path is not None:
        for u in sorted(adj):
            if st.digest.get(u, (None,))[0] == st.partner_path:
                edge = (min(u, v), max(u, v))
                break
    if edge is not None:
        flags |= _HAS_EDGE
    if not flags:
        return None
    ex, ey = edge if edge else (v, v)
    return ((wit, ex, ey), (), flags)


def _wit_key(val):
    # closure beats rotation, then smaller id
    return (not val[2] & _HAS_WIT, not val[2] & _CLOSURE, val[0][0])


def _edge_key(val):
    return (not val[2] & _HAS_EDGE, val[0][1], val[0][2])


def _wit_combine(a, b):
    w = min(a, b, key=_wit_key)
    e = min(a, b, key=_edge_key)
    flags = (w[2] & (_HAS_WIT | _CLOSURE)) | (e[2] & _HAS_EDGE)
    return ((w[0][0], e[0][1], e[0][2]), (), flags)


def _wit_decide(ctx, acc):
    st = ctx.state
    coin = int(ctx.rng.random() < 0.5)
    if acc is None:
        acc = ((st.vertex, st.vertex, st.vertex), (), 0)
    return (acc[0], (), acc[2] | (coin << 3))


def _wit_apply(st, payload):
    ids, _, flags = payload
    sc = st.scratch
    sc["wit"], sc["ex"], sc["ey"] = ids
    sc["cycled"] = bool(flags & _HAS_WIT)
    sc["closure"] = bool(flags & _CLOSURE)
    sc["has_edge"] = bool(flags & _HAS_EDGE)
    st.coin = (flags >> 3) & 1


def witness_broadcast() -> TreeAggregate:
    """Find a cycled witness and the smallest edge to the partner; draw the coin."""
    return TreeAggregate(_wit_local, _wit_combine, _wit_decide, _wit_apply)


class Exchange:
    """The own-side vertex of the connecting edge sends (cycled, coin) across it."""

    def step(self, ctx: Context) -> None:
        st = ctx.state
        sc = st.scratch
        v = ctx.vertex
        if ctx.phase_round == 0:
            sc["x_in"] = None
            if sc.get("has_edge") and v in (sc["ex"], sc["ey"]):
                other = sc["ey"] if v == sc["ex"] else sc["ex"]
                ctx.send(other, Message(Kind.EXCHANGE, (), (), int(sc["cycled"]) | (st.coin << 1)))
        else:
            for _, msg in ctx.inbox:
                sc["x_in"] = msg.flags
        ctx.halt()


def _l_local(ctx):
    got = ctx.state.scratch.get("x_in")
    return None if got is None else ((), (), got | 4)


def _l_decide(ctx, acc):
    st = ctx.state
    sc = st.scratch
    in_l = acc is not None and sc["cycled"] and sc["has_edge"] and bool(acc[2] & 1)
    pcoin = (acc[2] >> 1) & 1 if acc is not None else 0
    return ((), (), int(in_l) | (pcoin << 1))


def _l_apply(st, payload):
    flags = payload[2]
    st.scratch["in_l"] = bool(flags & 1)
    if flags & 1 and st.path_id > st.partner_path:
        st.coin = (flags >> 1) & 1


def l_membership_broadcast() -> TreeAggregate:
    """Leaders combine both cycled flags; the merged path keeps the smaller leader's coin."""
    return TreeAggregate(_l_local, lambda a, b: a, _l_decide, _l_apply)


# ---------------------------------------------------------------------------
# cycle merges


class CycleClose:
    """Close a cycled path into a cycle, by its endpoint edge or by rotation.

    Rotation at a witness w (succ(w) adjacent to the head, w adjacent to the
    tail) sends a REVERSE wave from succ(w) to the tail that swaps pred/succ,
    so the wave costs one round per segment vertex. ``select(state)`` picks
    the paths that close.
    """

    def __init__(self, select):
        self.select = select

    def step(self, ctx: Context) -> None:
        st = ctx.state
        sc = st.scratch
        v = ctx.vertex
        if ctx.phase_round == 0:
            if self.select(st) and st.head != st.tail:
                if sc["closure"]:
                    if v == st.tail:
                        st.succ = st.head
                    if v == st.head:
                        st.pred = st.tail
                elif v == sc["wit"]:
                    nxt = st.succ
                    st.succ = st.tail
                    ctx.send(nxt, Message(Kind.REVERSE))
            ctx.halt()
            return
        for sender, msg in ctx.inbox:
            if msg.kind == Kind.REVERSE:
                old_pred, old_succ = st.pred, st.succ
                st.pred, st.succ = old_succ, old_pred
                if sender == sc["wit"]:
                    st.succ = st.head
                    ctx.post(st.head, Message(Kind.NEW_PRED))
                if old_succ is None:
                    st.pred = sc["wit"]
                else:
                    ctx.post(old_succ, Message(Kind.REVERSE))
            elif msg.kind == Kind.NEW_PRED:
                st.pred = sender
        ctx.halt()


class CycleCut:
    """Join two closed cycles through the connecting edge {x, y}.

    The smaller-leader side cuts after x and the other side cuts before y;
    members of the other side adopt the smaller leader as path id.
    """

    def step(self, ctx: Context) -> None:
        st = ctx.state
        sc = st.scratch
        v = ctx.vertex
        if ctx.phase_round == 0:
            if sc.get("in_l"):
                first = st.path_id < st.partner_path
                if v in (sc["ex"], sc["ey"]):
                    other = sc["ey"] if v == sc["ex"] else sc["ex"]
                    if first:
                        old = st.succ
                        st.succ = other
                        if old is not None:
                            ctx.send(old, Message(Kind.CUT, (), (), 1))
                    else:
                        old = st.pred
                        st.pred = other
                        if old is not None:
                            ctx.send(old, Message(Kind.CUT, (), (), 2))
                if not first:
                    st.path_id = st.partner_path
            ctx.halt()
            return
        for _, msg in ctx.inbox:
            if msg.flags == 1:
                st.pred = None
            else:
                st.succ = None
        ctx.halt()


# ---------------------------------------------------------------------------
# reservations


def _d_set(st, adj) -> list[int]:
    """Eligible endpoints of other paths among the neighbours, ascending."""
    out = []
    for u in adj:
        entry = st.digest.get(u)
        if entry and entry[1] != INTERIOR and entry[2] and entry[0] != st.path_id:
            out.append(u)
    return out


class Reserve:
    """Edge and endpoint reservations, with usefulness filtered at the successor.

    u_j reserves (u_j, u_{j+1}) for a random v in D(u_j) and tells u_{j+1};
    u_{j+1} notifies the other endpoint w of v's path only if w is its
    neighbour. Every endpoint z reserves itself for a random w in D(z) and
    notifies w directly. ``reserver(state)`` gates which vertices reserve.
    Notifications land in ``scratch['cands']`` of the receiving endpoint.
    """

    def __init__(self, reserver=None):
        self.reserver = reserver

    def step(self, ctx: Context) -> None:
        st = ctx.state
        sc = st.scratch
        v = ctx.vertex
        if ctx.phase_round == 0:
            sc["cands"] = []
            sc["merge"] = None
            sc["res"] = []
            if self.reserver is None or self.reserver(st):
                d = _d_set(st, ctx.neighbors)
                rng = ctx.rng
                if d and st.succ is not None:
                    t = d[int(rng.integers(len(d)))]
                    q, kind, _ = st.digest[t]
                    sc["res"].append(("edge", v, st.succ, t))
                    ctx.post(st.succ, Message(Kind.RES_EDGE, (t,), (q,), int(kind == SINGLETON)))
                if d and (st.pred is None or st.succ is None):
                    t = d[int(rng.integers(len(d)))]
                    zhead = int(st.pred is None and st.succ is not None)
                    sc["res"].append(("end", v, v, t))
                    ctx.post(t, Message(Kind.NOTIFY_END, (v,), (st.path_id,), st.coin | (zhead << 1)))
            ctx.halt()
            return
        for sender, msg in ctx.inbox:
            if msg.kind == Kind.RES_EDGE:
                t, q = msg.ids[0], msg.paths[0]
                w = None
                if msg.flags:
                    w = t if t in ctx.neighbor_set else None
                else:
                    for u in ctx.neighbors:
                        entry = st.digest.get(u)
                        if u != t and entry and entry[0] == q and entry[1] != INTERIOR:
                            w = u
                            break
                if w is not None:
                    ctx.post(w, Message(Kind.NOTIFY_EDGE, (sender, v, t), (st.path_id,), st.coin))
            elif msg.kind == Kind.NOTIFY_EDGE:
                a, b, t = msg.ids
                sc["cands"].append(((a, b, t), msg.paths, msg.flags << 2))
            elif msg.kind == Kind.NOTIFY_END:
                z = msg.ids[0]
                sc["cands"].append(((z, z, v), msg.paths, 1 | ((msg.flags >> 1) << 1) | ((msg.flags & 1) << 2)))
        ctx.halt()


# ---------------------------------------------------------------------------
# picking and executing merges

# candidate flags: bit0 endpoint kind, bit1 target endpoint is a head, bit2 target coin
# payload flags: bit0 execute, bit1 flip, bit2 attach head below ids[0], bit3 attach tail above ids[1]


def _cand_key(val):
    return (val[0][0], val[2] & 1)


def _m_local(ctx):
    cands = ctx.state.scratch.get("cands")
    return min(cands, key=_cand_key) if cands else None


def _m_combine(a, b):
    return min(a, b, key=_cand_key)


def _m_decide(ctx, acc):
    st = ctx.state
    st.verdict["pick"] = acc
    st.verdict["source_coin"] = st.coin
    if acc is None or st.coin != 0 or not (acc[2] >> 2) & 1:
        return None
    (a, b, q), (target,), flags = acc
    single = st.head == st.tail
    if not flags & 1:
        flip = q != st.head
        out = 1 | 4 | 8
    elif not flags & 2:
        flip = q != st.head
        out = 1 | 4
    else:
        flip = q != st.tail
        out = 1 | 8
    if single:
        flip = False
    return ((a, b), (target,), out | (int(flip) << 1))


def _m_apply(st, payload):
    (a, b), (target,), flags = payload
    st.scratch["merge"] = payload
    if flags & 2:
        st.pred, st.succ = st.succ, st.pred
        st.head, st.tail = st.tail, st.head
    st.path_id = target


def merge_decision() -> TreeAggregate:
    """Leaders pick the smallest useful reservation and, if the coins allow, broadcast the merge."""
    return TreeAggregate(_m_local, _m_combine, _m_decide, _m_apply)


class Splice:
    """The merging path's endpoints attach to the target path's vertices."""

    def step(self, ctx: Context) -> None:
        st = ctx.state
        if ctx.phase_round == 0:
            plan = st.scratch.get("merge")
            if plan is not None:
                (a, b), _, flags = plan
                at_head = flags & 4 and st.pred is None
                at_tail = flags & 8 and st.succ is None
                if at_head:
                    st.pred = a
                    ctx.send(a, Message(Kind.ATTACH, (), (), 1))
                if at_tail:
                    st.succ = b
                    ctx.send(b, Message(Kind.ATTACH, (), (), 2))
            ctx.halt()
            return
        for sender, msg in ctx.inbox:
            if msg.flags == 1:
                assert st.coin == 1, "merge target must have drawn heads"
                st.succ = sender
            else:
                assert st.coin == 1, "merge target must have drawn heads"
                st.pred = sender
        ctx.halt()
