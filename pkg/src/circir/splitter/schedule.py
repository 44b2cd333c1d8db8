"""Greedy list scheduling of a dependence graph into blocks."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..ir import Protocol
from .depgraph import DepGraph


@dataclass
class Block:
    protocol: Protocol | None  # None for a non-computing singleton
    nodes: list[int] = field(default_factory=list)

    @property
    def is_compute(self) -> bool:
        return self.protocol is not None


def _groupable(n) -> bool:
    return n.is_compute and n.effect is None


def schedule(g: DepGraph) -> list[Block]:
    """Order the nodes topologically, grouping computation by protocol.

    The open block keeps taking ready nodes of its protocol (lowest id
    first).  When none is left the block closes; ready statements that
    cannot be grouped (effects, transfers, calls) are then emitted one at a
    time, and only when none remain does a new block open, on the protocol
    with the most ready nodes (ties go to the lowest id).
    """
    preds = g.preds()
    succs: dict[int, list[int]] = {n.id: [] for n in g.nodes}
    for a, b in g.edges:
        succs[a].append(b)
    missing = {k: len(v) for k, v in preds.items()}
    ready = {k for k, c in missing.items() if c == 0}
    nodes = {n.id: n for n in g.nodes}
    blocks: list[Block] = []
    current: Protocol | None = None

    def take(k: int):
        ready.discard(k)
        for t in succs[k]:
            missing[t] -= 1
            if missing[t] == 0:
                ready.add(t)

    while ready:
        if current is not None:
            same = [k for k in ready if _groupable(nodes[k]) and nodes[k].protocol == current]
            if same:
                k = min(same)
                blocks[-1].nodes.append(k)
                take(k)
                continue
            current = None
        single = [k for k in ready if not _groupable(nodes[k])]
        if single:
            k = min(single)
            blocks.append(Block(nodes[k].protocol, [k]))
            take(k)
            continue
        counts: dict[Protocol, list[int]] = {}
        for k in sorted(ready):
            counts.setdefault(nodes[k].protocol, []).append(k)
        current = min(counts, key=lambda p: (-len(counts[p]), counts[p][0]))
        blocks.append(Block(current, []))
    if sum(len(b.nodes) for b in blocks) != len(g.nodes):
        raise ValueError("dependence graph has a cycle")
    return blocks


def num_compute_blocks(blocks: list[Block]) -> int:
    return sum(1 for b in blocks if b.is_compute)


def cross_edges(g: DepGraph, blocks: list[Block]) -> int:
    """Data edges between different blocks with at least one end computing.

    These are the values a generated circuit imports or exports; edges
    between two plain statements are ordinary dataflow.
    """
    where = {k: i for i, b in enumerate(blocks) for k in b.nodes}
    return sum(1 for a, b in g.data
               if where[a] != where[b] and (blocks[where[a]].is_compute or blocks[where[b]].is_compute))
