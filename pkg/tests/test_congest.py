import pytest
from hypothesis import given, settings, strategies as st

from hamcongest.congest import (
    BitBudgetExceeded,
    DuplicateSend,
    Kind,
    Message,
    NotANeighbor,
    PayloadShapeError,
    RoundEngine,
    bit_budget,
    derive_randomness,
    id_bits,
    message_bits,
)
from hamcongest.graph import from_edge_list


def path_graph(n):
    return from_edge_list(n, [(i, i + 1) for i in range(n - 1)])


class Flood:
    """Max-id flood: every vertex rebroadcasts when its value grows."""

    def step(self, ctx):
        if ctx.state is None or ctx.phase_round == 0:
            ctx.state = {"best": ctx.vertex} if ctx.state is None else ctx.state
            ctx.broadcast(Message(Kind.PING, (ctx.vertex,)))
        else:
            best = max(m.ids[0] for _, m in ctx.inbox) if ctx.inbox else -1
            if best > ctx.state["best"]:
                ctx.state["best"] = best
                ctx.broadcast(Message(Kind.PING, (best,)))
        ctx.halt()


class OneShot:
    def __init__(self, action):
        self.action = action

    def step(self, ctx):
        if ctx.phase_round == 0 and ctx.vertex == 0:
            self.action(ctx)
        ctx.halt()


def test_budget_formula():
    assert id_bits(2) == 1 and id_bits(16) == 4 and id_bits(17) == 5
    assert bit_budget(16) == 40
    assert message_bits(Message(Kind.PING, (1, 2, 3), (4, 5)), 16) == 16 + 5 * 4


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 20))
def test_flood_converges_in_diameter_rounds(n):
    eng = RoundEngine(path_graph(n), 0, lambda v: {"best": v})
    res = eng.run(Flood())
    assert res.halted
    assert all(s["best"] == n - 1 for s in eng.states)
    assert res.rounds <= n
    assert res.peak_message_bits <= bit_budget(n)


def test_second_message_on_edge_aborts():
    def twice(ctx):
        ctx.send(1, Message(Kind.PING))
        ctx.send(1, Message(Kind.PING))

    with pytest.raises(DuplicateSend):
        RoundEngine(path_graph(3)).run(OneShot(twice))


def test_send_after_broadcast_aborts():
    def both(ctx):
        ctx.broadcast(Message(Kind.PING))
        ctx.send(1, Message(Kind.PING))

    with pytest.raises(DuplicateSend):
        RoundEngine(path_graph(3)).run(OneShot(both))


def test_non_neighbour_rejected():
    with pytest.raises(NotANeighbor):
        RoundEngine(path_graph(3)).run(OneShot(lambda ctx: ctx.send(2, Message(Kind.PING))))


def test_oversized_payload_rejected():
    with pytest.raises(PayloadShapeError):
        RoundEngine(path_graph(3), budget=1000).run(
            OneShot(lambda ctx: ctx.send(1, Message(Kind.PING, (0, 1, 2, 0)))))
    with pytest.raises(BitBudgetExceeded):
        RoundEngine(path_graph(3), budget=17).run(
            OneShot(lambda ctx: ctx.send(1, Message(Kind.PING, (0,)))))
    with pytest.raises(BitBudgetExceeded):
        RoundEngine(path_graph(3)).run(OneShot(lambda ctx: ctx.send(1, Message(Kind.PING, (), (), 256))))


def test_posted_messages_queue_fifo():
    got = []

    class Poster:
        def step(self, ctx):
            if ctx.phase_round == 0 and ctx.vertex == 0:
                for i in range(3):
                    ctx.post(1, Message(Kind.DATA, (i,)))
            for _, m in ctx.inbox:
                got.append((ctx.phase_round, m.ids[0]))
            ctx.halt()

    res = RoundEngine(path_graph(2)).run(Poster())
    assert got == [(1, 0), (2, 1), (3, 2)]
    assert res.rounds == 3 and res.total_messages == 3


def test_rounds_count_only_traffic():
    class Idle:
        def step(self, ctx):
            if ctx.phase_round >= 5:
                ctx.halt()

    res = RoundEngine(path_graph(4)).run(Idle())
    assert res.rounds == 0 and res.steps == 24


def test_round_cap_reports_not_halted():
    class Forever:
        def step(self, ctx):
            pass

    res = RoundEngine(path_graph(3)).run(Forever(), max_rounds=4)
    assert not res.halted


@given(st.integers(0, 2**32), st.integers(0, 100), st.integers(0, 100))
def test_randomness_is_keyed(seed, v, r):
    a = derive_randomness(seed, v, r).random(3)
    b = derive_randomness(seed, v, r).random(3)
    assert (a == b).all()
    assert not (a == derive_randomness(seed, v, r + 1).random(3)).all()


def test_trace_records_every_delivery():
    eng = RoundEngine(path_graph(3), trace=True)
    res = eng.run(Flood())
    assert len(eng.trace_lines()) == res.total_messages
