"""Per-vertex protocol state."""

from __future__ import annotations

from dataclasses import dataclass, field

INTERIOR, ENDPOINT, SINGLETON = 0, 1, 2


@dataclass
class VertexPathState:
    """Everything a vertex remembers between phases.

    Path ids are leader vertex ids. ``tree_up`` maps the root of every path
    tree this vertex takes part in (its own path's tree, plus trees it relays
    for) to its parent there; the root of its own tree has no entry.
    ``tree_children`` maps the same roots to child sets.
    """

    vertex: int
    degree: int = 0
    path_id: int = -1
    pred: int | None = None
    succ: int | None = None
    head: int = -1
    tail: int = -1
    partner_path: int | None = None
    coin: int = 0  # 1 = heads
    eligible: bool = True  # may be reserved for (RK runs restrict this)
    digest: dict[int, tuple[int, int, bool]] = field(default_factory=dict)
    published: tuple[int, int, bool] | None = None
    tree_up: dict[int, int] = field(default_factory=dict)
    tree_children: dict[int, set[int]] = field(default_factory=dict)
    tree_root: int | None = None  # root of the own-path tree this vertex is attached to
    # global tree
    g_root: int | None = None
    g_parent: int | None = None
    g_children: set[int] = field(default_factory=set)
    g_adjacent_root: bool = False
    # RK layering
    layer: int = -1
    heavy: bool = True
    layers: dict[int, int] = field(default_factory=dict)
    # scratch for the phase currently running
    scratch: dict = field(default_factory=dict)
    # outputs / instrumentation
    verdict: dict = field(default_factory=dict)
    useful: list = field(default_factory=list)

    @property
    def leader(self) -> int:
        return self.path_id

    @property
    def tree_parent(self) -> int | None:
        return self.tree_up.get(self.path_id)

    @property
    def is_endpoint(self) -> bool:
        return self.pred is None or self.succ is None

    @property
    def end_kind(self) -> int:
        if self.pred is None and self.succ is None:
            return SINGLETON
        return ENDPOINT if self.is_endpoint else INTERIOR

    def digest_entry(self) -> tuple[int, int, bool]:
        return (self.path_id, self.end_kind, self.eligible)
