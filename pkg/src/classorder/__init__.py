"""Class-order diagnostics for instance-of / subclass-of ontologies."""
from __future__ import annotations

from .census import ClassDef, Selector, census_counts, classes, count_by_subclass
from .fixed_order import Numbering, UniversalOrderClasses, derive_orders, order_conflicts, order_overlap
from .graph import OntoGraph, build_graph, down_set, scc_condense, type_set, up_set
from .ingest import EdgeKind, Format, load_edges, parse_edge_file
from .loops import LoopKind, LoopRecord, find_loops, find_self_loops, find_two_hop_loops, loop_affected_classes
from .min_order import min_order_levels, min_order_of
from .split_order import split_classes, split_exclusions, split_histogram, split_pairs_raw, split_reduce

__version__ = "0.1.0"

__all__ = [
    "ClassDef", "Selector", "census_counts", "classes", "count_by_subclass",
    "Numbering", "UniversalOrderClasses", "derive_orders", "order_conflicts", "order_overlap",
    "OntoGraph", "build_graph", "down_set", "scc_condense", "type_set", "up_set",
    "EdgeKind", "Format", "load_edges", "parse_edge_file",
    "LoopKind", "LoopRecord", "find_loops", "find_self_loops", "find_two_hop_loops", "loop_affected_classes",
    "min_order_levels", "min_order_of",
    "split_classes", "split_exclusions", "split_histogram", "split_pairs_raw", "split_reduce",
]
