"""Synchronous CONGEST round engine.

Every round each active vertex runs one step of a :class:`VertexProgram`,
seeing only its id, its neighbour ids, its own state and the messages that
arrived at the end of the previous round. Messages are checked against the
bit budget and against the one-message-per-edge-direction rule; either
violation aborts the run.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any, Callable, NamedTuple, Protocol

import numpy as np

from .graph import Graph

__all__ = [
    "Kind",
    "Message",
    "CongestViolation",
    "BitBudgetExceeded",
    "DuplicateSend",
    "NotANeighbor",
    "PayloadShapeError",
    "RoundCapExceeded",
    "ExecutionResult",
    "RoundEngine",
    "Context",
    "VertexProgram",
    "bit_budget",
    "id_bits",
    "message_bits",
    "derive_randomness",
    "run_rounds",
]


class Kind(IntEnum):
    """Protocol message tags (8 bits on the wire)."""

    PING = 0
    ELECT = 1
    ROOT_HELLO = 2
    ROOT_ADJ = 3
    GT_JOIN = 4
    PROPOSE = 5
    ACCEPT = 6
    MATCHED = 7
    SIDE_MIN = 8
    PATH_INFO = 9
    DIGEST = 10
    TREE_QUERY = 11
    TREE_REPLY = 12
    TREE_JOIN = 13
    TREE_LEAVE = 14
    RELAY_JOIN = 15
    RELAY_LEAVE = 16
    TREE_ATTACHED = 17
    UP = 18
    DOWN = 19
    PAIR_UP = 20
    PAIR_DOWN = 21
    SUCC_FLAG = 22
    EXCHANGE = 23
    REVERSE = 24
    NEW_PRED = 25
    CUT = 26
    RES_EDGE = 27
    NOTIFY_EDGE = 28
    NOTIFY_END = 29
    ATTACH = 30
    LAYER = 31
    BFS = 32
    STAR = 33
    DATA = 34
    UP_NONE = 35
    TREE_ASK = 36


class Message(NamedTuple):
    """A CONGEST message: tag, vertex-id slots, path-id slots and 8 flag bits."""

    kind: int
    ids: tuple[int, ...] = ()
    paths: tuple[int, ...] = ()
    flags: int = 0


class CongestViolation(RuntimeError):
    """A protocol broke the CONGEST contract; the run is aborted."""


class BitBudgetExceeded(CongestViolation):
    def __init__(self, round_: int, sender: int, receiver: int, size: int, budget: int):
        super().__init__(
            f"round {round_}: message {sender}->{receiver} has {size} bits > budget {budget}"
        )
        self.round, self.sender, self.receiver, self.size = round_, sender, receiver, size


class DuplicateSend(CongestViolation):
    def __init__(self, round_: int, sender: int, receiver: int):
        super().__init__(f"round {round_}: second message on edge direction {sender}->{receiver}")
        self.round, self.sender, self.receiver = round_, sender, receiver


class NotANeighbor(CongestViolation):
    pass


class PayloadShapeError(CongestViolation):
    """More than three vertex ids or two path ids in one message."""


class RoundCapExceeded(RuntimeError):
    pass


def id_bits(n: int) -> int:
    """Bits for one vertex or path id."""
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1


def bit_budget(n: int) -> int:
    """Default per-message budget: six id slots plus 16 bits of tag and flags."""
    return 6 * id_bits(n) + 16


def message_bits(msg: Message, n: int) -> int:
    return 16 + id_bits(n) * (len(msg.ids) + len(msg.paths))


def derive_randomness(master_seed: int, vertex: int, round_: int) -> np.random.Generator:
    """Independent-looking stream keyed by (master seed, vertex, round)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([master_seed, vertex, round_])))


class Context:
    """What a vertex may see and do during one step."""

    __slots__ = (
        "vertex", "neighbors", "neighbor_set", "n", "state", "inbox", "round",
        "phase_round", "_engine", "_rng", "_halt",
    )

    def __init__(self, engine: "RoundEngine"):
        self._engine = engine
        self.n = engine.graph.n

    @property
    def rng(self) -> np.random.Generator:
        if self._rng is None:
            self._rng = derive_randomness(self._engine.seed, self.vertex, self.round)
        return self._rng

    @property
    def degree(self) -> int:
        return len(self.neighbors)

    def send(self, to: int, msg: Message) -> None:
        """Send now; a second message on the same edge direction aborts the run."""
        self._engine._send(self.vertex, to, msg)

    def post(self, to: int, msg: Message) -> None:
        """Queue a message; it leaves in the first round the edge direction is free."""
        self._engine._post(self.vertex, to, msg)

    def broadcast(self, msg: Message) -> None:
        """Send ``msg`` to every neighbour this round (strict, like :meth:`send`)."""
        self._engine._broadcast(self.vertex, self.neighbors, msg)

    def halt(self) -> None:
        self._halt = True


class VertexProgram(Protocol):
    def step(self, ctx: Context) -> None: ...


@dataclass
class ExecutionResult:
    rounds: int
    steps: int
    total_messages: int
    peak_message_bits: int
    halted: bool
    states: list[Any] = field(repr=False, default_factory=list)

    def stats(self) -> dict:
        return {
            "rounds": self.rounds,
            "total_messages": self.total_messages,
            "peak_message_bits": self.peak_message_bits,
            "halted": self.halted,
        }


class RoundEngine:
    """Owns per-vertex states, mailboxes, the round counter and message accounting.

    Halting follows the usual vote-to-halt convention: a halted vertex is not
    stepped again until a message arrives for it.
    """

    def __init__(
        self,
        graph: Graph,
        seed: int = 0,
        state_factory: Callable[[int], Any] | None = None,
        budget: int | None = None,
        trace: bool = False,
    ):
        self.graph = graph
        self.seed = int(seed)
        self.budget = bit_budget(graph.n) if budget is None else budget
        self.states = [state_factory(v) if state_factory else None for v in range(graph.n)]
        self.round = 0
        self.total_rounds = 0
        self.total_messages = 0
        self.peak_message_bits = 0
        self.trace: list[tuple[int, int, int, int, str]] | None = [] if trace else None
        self._id_bits = id_bits(graph.n)
        self._nbr_sets = [graph.neighbor_set(v) for v in range(graph.n)]
        self._inbox: list[list[tuple[int, Message]]] = [[] for _ in range(graph.n)]
        self._outgoing: list[tuple[int, int, Message]] = []
        self._used: set[tuple[int, int]] = set()
        self._bcast: dict[int, Any] = {}
        self._sent_by: dict[int, int] = {}  # sender -> neighbour tuple, for this round's broadcasts
        self._queues: dict[int, dict[int, deque]] = {}
        self._round_sent = 0

    # -- message plumbing -------------------------------------------------
    def _check(self, sender: int, to: int, msg: Message) -> None:
        if to not in self._nbr_sets[sender]:
            raise NotANeighbor(f"round {self.round}: {sender} is not adjacent to {to}")
        li, lp = len(msg[1]), len(msg[2])
        size = 16 + self._id_bits * (li + lp)
        if size > self.peak_message_bits:
            if size > self.budget:
                raise BitBudgetExceeded(self.round, sender, to, size, self.budget)
            self.peak_message_bits = size
        if li > 3 or lp > 2:
            raise PayloadShapeError(f"round {self.round}: {sender}->{to} carries {li} ids and {lp} path ids")
        if not 0 <= msg[3] < 256:
            raise BitBudgetExceeded(self.round, sender, to, size, self.budget)

    def _send(self, sender: int, to: int, msg: Message) -> None:
        self._check(sender, to, msg)
        key = (sender, to)
        if key in self._used or sender in self._bcast:
            raise DuplicateSend(self.round, sender, to)
        self._used.add(key)
        self._sent_by[sender] = self._sent_by.get(sender, 0) + 1
        self._outgoing.append((sender, to, msg))

    def _broadcast(self, sender: int, nbrs, msg: Message) -> None:
        # one record for the whole fan-out; the edge-direction rule is checked per sender
        if not nbrs:
            return
        self._check(sender, nbrs[0], msg)
        if sender in self._bcast or self._sent_by.get(sender):
            to = nbrs[0] if sender in self._bcast else self._sent_by_first(sender)
            raise DuplicateSend(self.round, sender, to)
        self._bcast[sender] = nbrs
        self._outgoing.append((sender, -1, msg))

    def _sent_by_first(self, sender: int) -> int:
        return min(t for s, t in self._used if s == sender)

    def _post(self, sender: int, to: int, msg: Message) -> None:
        self._check(sender, to, msg)
        per = self._queues.get(sender)
        if per is None:
            per = self._queues[sender] = {}
        q = per.get(to)
        if q is None:
            per[to] = deque((msg,))
        else:
            q.append(msg)

    def _flush_queues(self) -> None:
        empty = []
        for sender, per_edge in self._queues.items():
            done = []
            for to, q in per_edge.items():
                if (sender, to) in self._used or sender in self._bcast:
                    continue
                self._used.add((sender, to))
                self._outgoing.append((sender, to, q.popleft()))
                if not q:
                    done.append(to)
            for to in done:
                del per_edge[to]
            if not per_edge:
                empty.append(sender)
        for sender in empty:
            del self._queues[sender]

    # -- execution ----------------------------------------------------------
    def run(self, program: VertexProgram, max_rounds: int = 10_000) -> ExecutionResult:
        """Run ``program`` until every vertex is halted with nothing in flight."""
        if max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        g = self.graph
        n = g.n
        active = [True] * n
        ctx = Context(self)
        rounds = steps = 0
        start_messages = self.total_messages
        start_peak = self.peak_message_bits
        self.peak_message_bits = 0
        phase_round = 0
        while True:
            pending = [v for v in range(n) if active[v] or self._inbox[v]]
            if not pending and not self._queues:
                break
            if phase_round >= max_rounds:
                self.peak_message_bits = max(self.peak_message_bits, start_peak)
                return ExecutionResult(rounds, steps, self.total_messages - start_messages,
                                       self.peak_message_bits, False, self.states)
            inboxes = self._inbox
            self._inbox = [[] for _ in range(n)]
            self._used.clear()
            self._bcast.clear()
            self._sent_by.clear()
            for v in pending:
                ctx.vertex = v
                ctx.neighbors = g.adjacency[v]
                ctx.neighbor_set = g.neighbor_set(v)
                ctx.state = self.states[v]
                ctx.inbox = inboxes[v]
                ctx.round = self.round
                ctx.phase_round = phase_round
                ctx._rng = None
                ctx._halt = False
                program.step(ctx)
                active[v] = not ctx._halt
                steps += 1
            self._flush_queues()
            if self._outgoing:
                rounds += 1
                inbox = self._inbox
                sent = 0
                for sender, to, msg in self._outgoing:
                    targets = self._bcast[sender] if to < 0 else (to,)
                    item = (sender, msg)
                    for t in targets:
                        inbox[t].append(item)
                        if self.trace is not None:
                            self.trace.append((self.round, sender, t, int(msg.kind), _payload_hex(msg)))
                    sent += len(targets)
                self.total_messages += sent
                self._outgoing = []
            self.round += 1
            phase_round += 1
        self.total_rounds += rounds
        peak = self.peak_message_bits
        self.peak_message_bits = max(peak, start_peak)
        return ExecutionResult(rounds, steps, self.total_messages - start_messages, peak, True, self.states)

    def trace_lines(self) -> list[str]:
        return [f"{r} {s} {t} {k} {p}" for r, s, t, k, p in (self.trace or [])]


def _payload_hex(msg: Message) -> str:
    words = list(msg.ids) + list(msg.paths) + [msg.flags]
    return "".join(f"{w & 0xFFFFFFFF:08x}" for w in words)


def run_rounds(engine: RoundEngine, program: VertexProgram, max_rounds: int) -> ExecutionResult:
    return engine.run(program, max_rounds)
