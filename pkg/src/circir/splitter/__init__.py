"""Split surface programs into strict IR with maximal circuit blocks."""

from .depgraph import DepGraph, Node, build_dep_graph, classify
from .emit import Metrics, emit_ir, split
from .schedule import Block, cross_edges, num_compute_blocks, schedule

__all__ = [
    "Block", "DepGraph", "Metrics", "Node", "build_dep_graph", "classify", "cross_edges",
    "emit_ir", "num_compute_blocks", "schedule", "split",
]
