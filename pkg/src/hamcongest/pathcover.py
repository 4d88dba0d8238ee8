"""Orchestration of the path-cover protocol on Dirac graphs.

The driver only sequences phases; each phase is a vertex program run to
quiescence on a shared :class:`RoundEngine`, so all decisions are made by
vertices from their own state and mail. Observations for statistics and
checks are taken through :class:`PathCoverView` between phases and never
fed back into the protocol.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable

from . import iteration as it
from .congest import RoundEngine
from .cover_init import FormPaths, PairAndCount, first_matching, second_matching
from .graph import Graph
from .oracle import PathCoverView
from .phases import DigestRefresh, GlobalTreeBFS, MinIdElection, PathTreeMaintenance, ProtocolError
from .state import VertexPathState

__all__ = [
    "HamResult",
    "ProtocolRun",
    "run",
    "default_iteration_cap",
    "CAP_FACTOR",
]

# 2 / log2(144/143) is 198.9; the stated default 200 is kept (slightly more slack)
CAP_FACTOR = 200
PHASE_ROUND_CAP = 100_000


def default_iteration_cap(n: int, factor: float = CAP_FACTOR) -> int:
    return max(1, math.ceil(factor * math.log2(max(n, 2))))


@dataclass
class HamResult:
    """Outcome of one protocol run."""

    n: int
    seed: int
    success: bool
    iterations: int
    congest_rounds: int
    cover_sizes: list[int]
    cycle: list[int] | None = None
    path: list[int] | None = None
    initial_path_sizes: list[int] = field(default_factory=list)
    peak_message_bits: int = 0
    total_messages: int = 0
    graph_class: str = "dirac"
    d_nonempty: bool = False
    drained_paths: int = 0
    closed: bool = False
    failure: str | None = None
    samples: list[dict] = field(default_factory=list, repr=False)
    tree_checks: list[dict] = field(default_factory=list, repr=False)

    def to_record(self, extended: bool = False) -> dict[str, Any]:
        rec: dict[str, Any] = {
            "n": self.n,
            "seed": self.seed,
            "iterations": self.iterations,
            "congest_rounds": self.congest_rounds,
            "cover_sizes": list(self.cover_sizes),
            "cycle": list(self.cycle) if self.cycle is not None else None,
        }
        if extended:
            rec["path"] = list(self.path) if self.path is not None else None
            rec["class"] = self.graph_class
            rec["d_nonempty"] = self.d_nonempty
            rec["drained_paths"] = self.drained_paths
        return rec

    def to_json(self, extended: bool = False) -> str:
        return json.dumps(self.to_record(extended), sort_keys=True, separators=(",", ":"))


class ProtocolRun:
    """Shared engine plus the phase sequence; RK runs subclass the hooks."""

    allow_singletons = False
    tree_fallback = False

    def __init__(self, g: Graph, seed: int, budget: int | None = None,
                 instrument: bool = False, check_trees: bool = False,
                 sample_hook: Callable[[dict], None] | None = None):
        self.g = g
        self.seed = int(seed)
        self.engine = RoundEngine(g, seed, lambda v: VertexPathState(v, g.degree(v)), budget)
        self.instrument = instrument
        self.check_trees = check_trees
        self.sample_hook = sample_hook
        self.samples: list[dict] = []
        self.tree_checks: list[dict] = []
        self.cover_sizes: list[int] = []
        self.initial_sizes: list[int] = []

    # -- helpers --------------------------------------------------------------
    @property
    def states(self) -> list[VertexPathState]:
        return self.engine.states

    def phase(self, program) -> None:
        res = self.engine.run(program, PHASE_ROUND_CAP)
        if not res.halted:
            raise ProtocolError(f"phase {type(program).__name__} hit the round cap")

    def view(self) -> PathCoverView:
        return PathCoverView.from_states(self.states)

    def refresh(self, force: bool = False) -> None:
        self.phase(DigestRefresh(force))
        self.phase(PathTreeMaintenance(self.tree_fallback))
        if self.check_trees:
            self.tree_checks.append(tree_report(self.g, self.states))

    # -- protocol -------------------------------------------------------------
    def setup(self) -> None:
        self.phase(MinIdElection())
        self.phase(GlobalTreeBFS(self.tree_members()))
        self.phase(first_matching())
        self.phase(second_matching())
        self.phase(FormPaths(self.allow_singletons))
        self.initial_sizes = sorted(len(p) for p in self.view().paths)
        self.refresh(force=True)

    def tree_members(self):
        return None

    def count_paths(self) -> bool:
        """Run pairing plus the termination count; True when one path is left."""
        self.phase(PairAndCount())
        root = self.states[self.states[0].g_root]
        return bool(root.verdict.get("done"))

    def iterate(self) -> None:
        """One merge iteration, after pairing."""
        inst = self.instrument
        before = len(self.view().paths) if inst else 0
        self.phase(it.head_tail_broadcast())
        self.phase(it.SuccFlag())
        self.phase(it.witness_broadcast())
        self.phase(it.Exchange())
        self.phase(it.l_membership_broadcast())
        pairs_l = sum(1 for s in self.states if s.path_id == s.vertex and s.scratch.get("in_l")) // 2 if inst else 0
        self.phase(it.CycleClose(lambda st: st.scratch.get("in_l", False)))
        self.phase(it.CycleCut())
        self.refresh()
        self.phase(it.head_tail_broadcast())
        self.phase(DigestRefresh())
        self.phase(it.Reserve())
        sample = self._observe_reservations(before, pairs_l) if inst else None
        self.phase(it.merge_decision())
        self.phase(it.Splice())
        self.refresh()
        if sample is not None:
            sample["after"] = len(self.view().paths)
            self._close_sample(sample)

    def _observe_reservations(self, before: int, pairs_l: int) -> dict:
        from .oracle import good_paths

        view = self.view()
        good = good_paths(self.g, view.paths)
        hit = {s.path_id for s in self.states if s.scratch.get("cands")}
        return {
            "before": before,
            "l_pairs": pairs_l,
            "cover_a": len(view.paths),
            "good": len(good),
            "good_hit": sum(1 for i in good if view.ids[i] in hit),
            "hit": len(hit),
        }

    def _close_sample(self, sample: dict) -> None:
        leaders = [s for s in self.states if s.verdict.get("pick") is not None]
        sample["picked"] = len(leaders)
        for s in self.states:
            s.verdict.pop("pick", None)
        self.samples.append(sample)
        if self.sample_hook:
            self.sample_hook(sample)

    def close_cycle(self, allow: Callable[[VertexPathState], bool] | None = None) -> bool:
        """Turn the single remaining path into a cycle; False if it stays open."""
        self.phase(it.head_tail_broadcast())
        self.phase(it.SuccFlag())
        self.phase(it.witness_broadcast())
        select = (lambda st: st.scratch["cycled"]) if allow is None else (
            lambda st: st.scratch["cycled"] and allow(st))
        self.phase(it.CycleClose(select))
        return all(s.pred is not None and s.succ is not None for s in self.states)

    def main_loop(self, cap: int) -> int:
        iterations = 0
        self.cover_sizes = [len(self.view().paths)]
        while not self.count_paths():
            if iterations >= cap:
                break
            self.iterate()
            iterations += 1
            self.cover_sizes.append(len(self.view().paths))
        return iterations


def tree_report(g: Graph, states: list[VertexPathState]) -> dict:
    """Concurrent path-tree usage per edge and maximum member depth."""
    per_edge: dict[tuple[int, int], set[int]] = {}
    for s in states:
        for root, parent in s.tree_up.items():
            per_edge.setdefault((min(s.vertex, parent), max(s.vertex, parent)), set()).add(root)
    max_depth = 0
    for s in states:
        r = s.path_id
        if s.vertex == r:
            continue
        d, cur, seen = 0, s.vertex, 0
        while cur != r:
            cur = states[cur].tree_up[r]
            d += 1
            seen += 1
            if seen > len(states):
                raise AssertionError("cycle in a path tree")
        max_depth = max(max_depth, d)
    return {
        "max_trees_per_edge": max((len(v) for v in per_edge.values()), default=0),
        "max_depth": max_depth,
    }


def run(g: Graph, seed: int = 0, iteration_cap: int | None = None, *,
        check_class: bool = True, budget: int | None = None, instrument: bool = False,
        check_trees: bool = False) -> HamResult:
    """Find a Hamiltonian cycle in a Dirac graph with the distributed protocol."""
    n = g.n
    if n < 3:
        raise ValueError("a Hamiltonian cycle needs at least 3 vertices")
    if check_class and 2 * g.min_degree() < n:
        raise ValueError("input graph is not Dirac (minimum degree < n/2)")
    cap = default_iteration_cap(n) if iteration_cap is None else iteration_cap
    pr = ProtocolRun(g, seed, budget, instrument, check_trees)
    pr.setup()
    iterations = pr.main_loop(cap)
    eng = pr.engine
    view = pr.view()
    res = HamResult(
        n=n, seed=int(seed), success=False, iterations=iterations,
        congest_rounds=eng.total_rounds, cover_sizes=pr.cover_sizes,
        initial_path_sizes=pr.initial_sizes, samples=pr.samples, tree_checks=pr.tree_checks,
    )
    if len(view.paths) != 1:
        res.failure = f"iteration cap {cap} reached with {len(view.paths)} paths"
    else:
        res.path = list(view.paths[0])
        res.closed = pr.close_cycle()
        if res.closed:
            res.cycle = PathCoverView.cycle_from_states(pr.states)
            res.success = True
        else:
            res.failure = "final path could not be closed"
    res.congest_rounds = eng.total_rounds
    res.total_messages = eng.total_messages
    res.peak_message_bits = eng.peak_message_bits
    return res
