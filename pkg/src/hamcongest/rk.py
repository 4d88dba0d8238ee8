"""Ore and RK inputs: layering around a low-degree vertex, the D-nonempty shortcut,
draining of non-heavy endpoints, and the driver."""

from __future__ import annotations

from dataclasses import dataclass, field

from .congest import Context, Kind, Message, RoundEngine
from .graph import Graph, classify
from .oracle import PathCoverView, is_cycled_ref
from .pathcover import HamResult, ProtocolRun, default_iteration_cap, run as run_dirac
from .phases import ProtocolError, TreeAggregate
from .state import VertexPathState

__all__ = [
    "RkClassification",
    "RkStructureError",
    "classify_rk",
    "check_rk_invariants",
    "solve_d_nonempty",
    "endgame_case",
    "run_rk",
    "ELECTION_ROUNDS",
]

# every vertex of an RK graph is within 4 hops of v_star, so any two are within 8
ELECTION_ROUNDS = 8


class RkStructureError(ProtocolError):
    """An RK structure claim failed: the input is not an RK graph."""


@dataclass
class RkClassification:
    n: int
    v_star: int | None
    layer: list[int]
    heavy: list[bool]
    rounds: int = 0
    sets: dict[str, list[int]] = field(default_factory=dict)

    @property
    def d_nonempty(self) -> bool:
        return bool(self.sets.get("D"))

    def members(self, name: str) -> list[int]:
        return self.sets.get(name, [])


# ---------------------------------------------------------------------------
# vertex programs


class LowDegreeElection:
    """Fixed-length flood of the smallest id among vertices with degree < n/2."""

    def __init__(self, rounds: int = ELECTION_ROUNDS):
        self.rounds = rounds

    def step(self, ctx: Context) -> None:
        st = ctx.state
        if ctx.phase_round == 0:
            st.verdict["v_star"] = ctx.vertex if 2 * ctx.degree < ctx.n else None
        for _, msg in ctx.inbox:
            cur = st.verdict["v_star"]
            if cur is None or msg.ids[0] < cur:
                st.verdict["v_star"] = msg.ids[0]
        best = st.verdict["v_star"]
        if ctx.phase_round < self.rounds and best is not None:
            ctx.broadcast(Message(Kind.ELECT, (best,)))
        if ctx.phase_round >= self.rounds:
            ctx.halt()


class RkLayering:
    """BFS from v_star; every vertex announces (layer, heavy) once to all neighbours."""

    def step(self, ctx: Context) -> None:
        st = ctx.state
        # 2d >= n - 1 equals d >= n/2 for even n; for odd n it also admits
        # the degree (n - 1)/2 that B vertices may have
        heavy = 2 * ctx.degree >= ctx.n - 1
        if ctx.phase_round == 0:
            st.heavy = heavy
            st.layers = {}
            st.layer = -1
            if st.verdict.get("v_star") == ctx.vertex:
                st.layer = 0
                ctx.broadcast(Message(Kind.LAYER, (0,), (), int(heavy)))
            ctx.halt()
            return
        for sender, msg in ctx.inbox:
            st.layers[sender] = (msg.ids[0], bool(msg.flags))
        if st.layer < 0 and st.layers:
            st.layer = min(l for l, _ in st.layers.values()) + 1
            if st.layer > 4:
                raise RkStructureError(f"vertex {ctx.vertex} is {st.layer} hops from v_star")
            ctx.broadcast(Message(Kind.LAYER, (st.layer,), (), int(heavy)))
        ctx.halt()


class StitchDNonEmpty:
    """Local pointer choice: v_star, A ascending with a0 moved last, the B vertex, C then D ascending.

    a0 is the smallest A neighbour of the B vertex. Not every A vertex need
    touch B, so the B vertex names a0 and a0 announces itself to the A clique
    (two rounds). C and D together form a clique that B is complete to.
    """

    def step(self, ctx: Context) -> None:
        st = ctx.state
        v = ctx.vertex
        if ctx.phase_round == 0:
            if st.layer == 2:
                a0 = min(u for u, (l, _) in st.layers.items() if l == 1)
                st.scratch["a0"] = a0
                ctx.send(a0, Message(Kind.STAR, (a0,)))
            if st.layer >= 2:
                self._link(ctx)
            ctx.halt()
            return
        for _, msg in ctx.inbox:
            st.scratch["a0"] = msg.ids[0]
            if msg.ids[0] == v and ctx.phase_round == 1:
                ctx.broadcast(Message(Kind.STAR, (v,)))
        if st.layer <= 1 and "a0" in st.scratch:
            self._link(ctx)
        ctx.halt()

    def _link(self, ctx: Context) -> None:
        st = ctx.state
        v = ctx.vertex
        v_star = st.verdict["v_star"]
        by_layer: dict[int, list[int]] = {}
        for u, (l, _) in st.layers.items():
            by_layer.setdefault(l, []).append(u)
        own = st.layer
        if own <= 1:
            a0 = st.scratch["a0"]
            order = [v_star] + sorted(x for x in by_layer.get(1, []) + [v] if x not in (v_star, a0))
            order.append(a0)
            i = order.index(v)
            st.pred = order[i - 1] if i else None
            st.succ = order[i + 1] if i + 1 < len(order) else by_layer[2][0]
        elif own == 2:
            st.pred = st.scratch["a0"]
            st.succ = min(by_layer[3])
        else:
            tail = sorted(by_layer.get(3, []) + ([v] if own == 3 else []))
            tail += sorted(by_layer.get(4, []) + ([v] if own == 4 else []))
            i = tail.index(v)
            st.pred = tail[i - 1] if i else [u for u, (l, _) in st.layers.items() if l == 2][0]
            st.succ = tail[i + 1] if i + 1 < len(tail) else None
        st.path_id = v_star
        ctx.halt()


# ---------------------------------------------------------------------------
# classification


def _classification_from_states(g: Graph, states, rounds: int) -> RkClassification:
    v_star = states[0].verdict.get("v_star")
    layer = [s.layer for s in states]
    heavy = [2 * g.degree(v) >= g.n for v in range(g.n)]
    cls = RkClassification(g.n, v_star, layer, heavy, rounds)
    if v_star is None:
        return cls
    names = {1: "A", 2: "B", 3: "C", 4: "D"}
    for name in names.values():
        cls.sets[name] = []
    for v in range(g.n):
        if layer[v] in names:
            cls.sets[names[layer[v]]].append(v)
    cls.sets["H"] = [v for v in range(g.n) if heavy[v]]
    cls.sets["A_hat"] = [v for v in cls.sets["A"] if not heavy[v]]
    cls.sets["C_hat"] = [v for v in cls.sets["C"] if not heavy[v]]
    cls.sets["A_plus"] = sorted(cls.sets["A_hat"] + [v_star])
    return cls


def check_rk_invariants(g: Graph, cls: RkClassification) -> None:
    """Raise :class:`RkStructureError` naming a witness if a structure claim fails."""
    if cls.v_star is None:
        return
    for v in range(g.n):
        if cls.layer[v] < 0:
            raise RkStructureError(f"vertex {v} unreachable from v_star: graph disconnected")
    for b in cls.members("B"):
        if 2 * g.degree(b) < g.n - 1:
            raise RkStructureError(f"B vertex {b} has degree below (n - 1)/2")
    ap = cls.members("A_plus")
    for i, a in enumerate(ap):
        for a2 in ap[i + 1:]:
            if not g.has_edge(a, a2):
                raise RkStructureError(f"A+ vertices {a},{a2} are not adjacent")
    bc = set(cls.members("B")) | set(cls.members("C"))
    d = cls.members("D")
    for c in cls.members("C"):
        want = (bc | set(d)) - {c}
        if g.neighbor_set(c) != want:
            raise RkStructureError(f"C vertex {c} has neighbourhood other than (B u C u D) minus itself")
    if d:
        if len(cls.members("B")) != 1:
            raise RkStructureError(f"D is nonempty but |B| = {len(cls.members('B'))}")
        a_set = set(cls.members("A"))
        b_set = set(cls.members("B"))
        allowed = a_set | {cls.v_star} | b_set
        for a in a_set:
            nb = g.neighbor_set(a)
            if not (allowed - {a} - b_set) <= nb or not nb <= allowed:
                raise RkStructureError(f"A vertex {a} is not adjacent to v_star and all of A, or has a neighbour beyond B")
        cd = set(cls.members("C")) | set(d)
        for x in d:
            if g.neighbor_set(x) != cd - {x}:
                raise RkStructureError(f"D vertex {x} is not adjacent to exactly C and D")


def _classify_on(engine: RoundEngine) -> RkClassification:
    start = engine.total_rounds
    engine.run(LowDegreeElection(), ELECTION_ROUNDS + 2)
    if engine.states[0].verdict.get("v_star") is not None:
        engine.run(RkLayering(), 16)
    return _classification_from_states(engine.graph, engine.states, engine.total_rounds - start)


def classify_rk(g: Graph, seed: int = 0) -> RkClassification:
    """Distributed layering around v_star; structure claims are then checked with a witness."""
    engine = RoundEngine(g, seed, lambda v: VertexPathState(v, g.degree(v)))
    cls = _classify_on(engine)
    check_rk_invariants(g, cls)
    return cls


def solve_d_nonempty(g: Graph, seed: int = 0) -> tuple[list[int], RkClassification]:
    """Hamiltonian path for an RK graph whose BFS from v_star reaches distance 4."""
    engine = RoundEngine(g, seed, lambda v: VertexPathState(v, g.degree(v)))
    cls = _classify_on(engine)
    check_rk_invariants(g, cls)
    if not cls.d_nonempty:
        raise ValueError("the D layer is empty")
    engine.run(StitchDNonEmpty(), 6)
    view = PathCoverView.from_states(engine.states)
    if len(view.paths) != 1:
        raise RkStructureError("stitching did not produce a single path")
    cls.rounds = engine.total_rounds
    return list(view.paths[0]), cls


# ---------------------------------------------------------------------------
# draining non-heavy endpoints


def _in_a_plus(st) -> bool:
    return st.layer == 0 or (st.layer == 1 and not st.heavy)


def _in_c_hat(st) -> bool:
    return st.layer == 3 and not st.heavy


class DrainReport:
    """Endpoints in the clique ``member`` report (id, path, head/tail bits) to its coordinator.

    The coordinator chains paths greedily in ascending leader order: one path
    with a single clique endpoint, then every path whose endpoints both lie in
    the clique, then a second single; leftover singles are joined in pairs.
    It answers each involved endpoint with the new leader, a flip bit and the
    neighbour(s) to link to.
    """

    def __init__(self, member, coordinator):
        self.member = member
        self.coordinator = coordinator

    def step(self, ctx: Context) -> None:
        st = ctx.state
        sc = st.scratch
        v = ctx.vertex
        if ctx.phase_round == 0:
            sc["drain"] = None
            sc["drain_reports"] = []
            if self.member(st) and (st.pred is None or st.succ is None):
                bits = int(st.pred is None) | (int(st.succ is None) << 1)
                co = self.coordinator(st, ctx)
                if co == v:
                    sc["drain_reports"].append((v, st.path_id, bits))
                else:
                    ctx.send(co, Message(Kind.DATA, (v,), (st.path_id,), bits))
            if self.member(st) and self.coordinator(st, ctx) == v:
                sc["drain_wait"] = True
                return  # stay awake for one round to collect reports
            ctx.halt()
            return
        for sender, msg in ctx.inbox:
            if msg.kind == Kind.DATA and not msg.paths:
                leader, pl, sl = msg.ids
                sc["drain"] = (leader, pl, sl, msg.flags)
            elif msg.kind == Kind.DATA:
                sc["drain_reports"].append((msg.ids[0], msg.paths[0], msg.flags))
        if sc.pop("drain_wait", False):
            self._plan(ctx)
        ctx.halt()

    def _plan(self, ctx: Context) -> None:
        st = ctx.state
        by_path: dict[int, list[tuple[int, int]]] = {}
        for z, pid, bits in st.scratch["drain_reports"]:
            by_path.setdefault(pid, []).append((z, bits))
        singles, doubles = [], []
        for pid in sorted(by_path):
            ends = by_path[pid]
            if len(ends) == 2 or ends[0][1] == 3:
                doubles.append(pid)
            else:
                singles.append(pid)
        groups = []
        head_part = singles[:1] + doubles + singles[1:2]
        if len(head_part) >= 2:
            groups.append((head_part, bool(singles[:1]), len(singles) >= 2))
        rest = singles[2:]
        for i in range(0, len(rest) - 1, 2):
            groups.append((rest[i:i + 2], True, True))
        plans: dict[int, list] = {}
        links = 0
        for paths, first_single, last_single in groups:
            leader = min(paths)
            chain = []  # (pid, entry vertex or None, exit vertex or None, flip)
            for k, pid in enumerate(paths):
                ends = by_path[pid]
                if (k == 0 and first_single) or (k == len(paths) - 1 and last_single and k > 0):
                    z, bits = ends[0]
                    if k == 0:
                        chain.append((pid, None, z, bits == 1))
                    else:
                        chain.append((pid, z, None, bits == 2))
                else:
                    head = next(z for z, b in ends if b & 1)
                    tail = next(z for z, b in ends if b & 2)
                    chain.append((pid, head, tail, False))
            for k, (pid, entry, exit_, flip) in enumerate(chain):
                pred_link = chain[k - 1][2] if k > 0 else None
                succ_link = chain[k + 1][1] if k + 1 < len(chain) else None
                for z, _ in by_path[pid]:
                    p_l = pred_link if z == entry else None
                    s_l = succ_link if z == exit_ else None
                    plans[z] = [leader, p_l, s_l, flip]
                if succ_link is not None:
                    links += 1
        st.verdict["drained"] = st.verdict.get("drained", 0) + links
        for z in sorted(plans):
            leader, p_l, s_l, flip = plans[z]
            flags = 1 | (int(flip) << 1) | (int(p_l is not None) << 2) | (int(s_l is not None) << 3)
            ids = (leader, z if p_l is None else p_l, z if s_l is None else s_l)
            if z == ctx.vertex:
                st.scratch["drain"] = ids + (flags,)
            else:
                ctx.send(z, Message(Kind.DATA, ids, (), flags))


def _drain_local(ctx):
    plan = ctx.state.scratch.get("drain")
    return None if plan is None else ((plan[0],), (), plan[3] & 2)


def _drain_decide(ctx, acc):
    return acc


def _drain_apply(st, payload):
    (leader,), _, flags = payload
    if flags & 2:
        st.pred, st.succ = st.succ, st.pred
    st.path_id = leader


def drain_broadcast() -> TreeAggregate:
    """Carry a drain plan's flip bit and new leader from an endpoint to its whole path."""
    return TreeAggregate(_drain_local, lambda a, b: a, _drain_decide, _drain_apply)


class DrainLink:
    """Endpoints named in a drain plan link to their neighbours in the chain."""

    def step(self, ctx: Context) -> None:
        st = ctx.state
        plan = st.scratch.get("drain")
        if plan is not None:
            _, p_l, s_l, flags = plan
            if flags & 4:
                st.pred = p_l
            if flags & 8:
                st.succ = s_l
            st.scratch["drain"] = None
        ctx.halt()


def _a_plus_coordinator(st, ctx) -> int:
    return st.verdict["v_star"]


def _c_hat_coordinator(st, ctx) -> int:
    peers = [u for u, (l, h) in st.layers.items() if l == 3 and not h]
    return min(peers + [ctx.vertex])


# ---------------------------------------------------------------------------
# closing the final path


def _deg_local(ctx):
    st = ctx.state
    mask = (st.pred is None) | ((st.succ is None) << 1)
    return ((ctx.degree, ctx.degree), (), mask) if mask else None


def _deg_combine(a, b):
    dh = a[0][0] if a[2] & 1 else b[0][0]
    dt = a[0][1] if a[2] & 2 else b[0][1]
    return ((dh, dt), (), a[2] | b[2])


def _deg_decide(ctx, acc):
    (dh, dt), _, _ = acc
    return ((), (), int(dh + dt >= ctx.n))


def _deg_apply(st, payload):
    st.scratch["deg_ok"] = bool(payload[2])


def endpoint_degree_check() -> TreeAggregate:
    """Leaders test d(u) + d(v) >= n for their endpoints and broadcast the verdict."""
    return TreeAggregate(_deg_local, _deg_combine, _deg_decide, _deg_apply)


# ---------------------------------------------------------------------------
# driver


class RkProtocolRun(ProtocolRun):
    allow_singletons = True
    tree_fallback = True

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.endgame_cases: list[str] = []

    def drain(self) -> None:
        for member, coordinator in ((_in_a_plus, _a_plus_coordinator), (_in_c_hat, _c_hat_coordinator)):
            self.phase(DrainReport(member, coordinator))
            self.phase(drain_broadcast())
            self.phase(DrainLink())
            self.refresh()

    def main_loop(self, cap: int) -> int:
        iterations = 0
        self.drain()
        self.cover_sizes = [len(self.view().paths)]
        while not self.count_paths():
            if iterations >= cap:
                break
            if self.states[self.states[0].g_root].verdict.get("two"):
                paths = self.view().paths
                self.endgame_cases.append(endgame_case(self.g, paths[0], paths[1]))
            self.iterate()
            self.drain()
            iterations += 1
            self.cover_sizes.append(len(self.view().paths))
        return iterations

    def drained(self) -> int:
        return sum(s.verdict.get("drained", 0) for s in self.states)


def endgame_case(g: Graph, p1, p2) -> str:
    """Sequential check that two paths admit one of the finishing merges.

    Returns "concatenation", "elementary" or "cycle"; raises if none applies.
    """
    ends1, ends2 = {p1[0], p1[-1]}, {p2[0], p2[-1]}
    if any(g.has_edge(a, b) for a in ends1 for b in ends2):
        return "concatenation"
    for p, q in ((p1, p2), (p2, p1)):
        nu, nv = g.neighbor_set(p[0]), g.neighbor_set(p[-1])
        for a, b in zip(q, q[1:]):
            if (a in nu and b in nv) or (b in nu and a in nv):
                return "elementary"
    if is_cycled_ref(g, p1) and is_cycled_ref(g, p2):
        if any(g.neighbor_set(v) & set(p2) for v in p1):
            return "cycle"
    raise RkStructureError(f"no finishing merge for paths {tuple(p1)} and {tuple(p2)}")


def run_rk(g: Graph, seed: int = 0, iteration_cap: int | None = None, *,
           budget: int | None = None, check_class: bool = True) -> HamResult:
    """Hamiltonian cycle for Ore inputs and Hamiltonian path for RK inputs."""
    report = classify(g)
    if check_class and not report.is_rk:
        raise ValueError(f"input graph is not RK (witness {report.witness}, {report.witness_reason})")
    gclass = "dirac" if report.is_dirac else "ore" if report.is_ore else "rk"
    if report.is_dirac:
        res = run_dirac(g, seed, iteration_cap, check_class=False, budget=budget)
        res.graph_class = gclass
        return res
    if g.n < 3:
        raise ValueError("need at least 3 vertices")
    cap = default_iteration_cap(g.n) if iteration_cap is None else iteration_cap
    pr = RkProtocolRun(g, seed, budget)
    cls = _classify_on(pr.engine)
    check_rk_invariants(g, cls)
    res = HamResult(n=g.n, seed=int(seed), success=False, iterations=0, congest_rounds=0,
                    cover_sizes=[], graph_class=gclass, d_nonempty=cls.d_nonempty)
    if cls.d_nonempty:
        pr.engine.run(StitchDNonEmpty(), 6)
        res.cover_sizes = [1]
        res.path = list(pr.view().paths[0])
    else:
        pr.setup()
        res.initial_path_sizes = pr.initial_sizes
        res.iterations = pr.main_loop(cap)
        res.cover_sizes = pr.cover_sizes
        res.drained_paths = pr.drained()
        paths = pr.view().paths
        if len(paths) != 1:
            res.failure = f"iteration cap {cap} reached with {len(paths)} paths"
        else:
            res.path = list(paths[0])
            pr.phase(endpoint_degree_check())
            res.closed = pr.close_cycle(lambda st: st.scratch.get("deg_ok", False))
            if res.closed:
                res.cycle = PathCoverView.cycle_from_states(pr.states)
    res.success = res.path is not None and (res.cycle is not None or gclass == "rk")
    if res.success is False and res.failure is None:
        res.failure = "Ore input but the final path could not be closed"
    res.congest_rounds = pr.engine.total_rounds
    res.total_messages = pr.engine.total_messages
    res.peak_message_bits = pr.engine.peak_message_bits
    return res
