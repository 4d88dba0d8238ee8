"""The round engine on its own: a max-id flood and what the simulator refuses."""

from hamcongest.congest import DuplicateSend, Kind, Message, RoundEngine
from hamcongest.graph import from_edge_list

ring = from_edge_list(8, [(i, (i + 1) % 8) for i in range(8)])


class MaxFlood:
    # state is a one-element list: the engine keeps the object, so mutate it
    def step(self, ctx):
        best = max([ctx.vertex] + [m.ids[0] for _, m in ctx.inbox])
        if ctx.phase_round == 0 or best > ctx.state[0]:
            ctx.state[0] = best
            ctx.broadcast(Message(Kind.PING, (best,)))
        ctx.halt()


eng = RoundEngine(ring, seed=0, state_factory=lambda v: [v], trace=True)
res = eng.run(MaxFlood())
print("everyone agrees on", {s[0] for s in eng.states}, "after", res.rounds, "rounds")
print("first deliveries (round sender receiver kind payload):")
for line in eng.trace_lines()[:4]:
    print("  ", line)


class Chatty:
    # two messages on one edge direction in one round is a CONGEST violation
    def step(self, ctx):
        if ctx.vertex == 0:
            ctx.send(1, Message(Kind.PING))
            ctx.send(1, Message(Kind.PING))
        ctx.halt()


try:
    RoundEngine(ring).run(Chatty())
except DuplicateSend as exc:
    print("refused:", exc)
