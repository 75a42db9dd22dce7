"""Routing-space difference detection: potential blackholes between tables.

A relaxed traversal of the joint trie. After next-hop inheritance, a node
whose resolved array mixes default-derived hops (the slot was filled from
a table's 0/0 route, real or synthesized) with specific hops marks a spot
where one table falls through to its default while another has a concrete
route, so traffic may be dropped at the less specific router.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .model import FibEntry, FibTable, MetricsContext, Prefix, require_same_width
from .trie import ORIGIN_DEFAULT, ORIGIN_SYNTH, NodeKind, TrieNode, node_census
from .verify import inherit_next_hops, prepare


@dataclass(frozen=True)
class LeakPoint:
    """A prefix where default-derived and specific next hops coexist."""

    prefix: Prefix
    hops: tuple[int, ...]
    #: True per table whose hop here comes from its (possibly synthesized) default.
    default_derived: tuple[bool, ...]


@dataclass
class LeakReport:
    width: int
    table_names: list[str]
    leak_points: list[LeakPoint] = field(default_factory=list)
    #: Per table: number of maximal subtrees in which it leaks routes.
    leaking_routes_per_table: tuple[int, ...] = ()
    synthesized_defaults: tuple[bool, ...] = ()
    metrics: MetricsContext = field(default_factory=MetricsContext)
    census: tuple[int, int, int] = (0, 0, 0)

    @property
    def clean(self) -> bool:
        return not self.leak_points


def detect_leaks(tables: list[FibTable]) -> LeakReport:
    """Find every prefix where some table resolves via default while another
    has a specific route, and count maximal leaking subtrees per table."""
    metrics = MetricsContext()
    trie = prepare(tables, metrics)
    report = LeakReport(
        width=trie.width,
        table_names=[t.name or f"table{i + 1}" for i, t in enumerate(tables)],
        synthesized_defaults=tuple(trie.synthesized_defaults),
        metrics=metrics,
        census=node_census(trie),
    )
    counts = [0] * trie.table_count

    def walk(ancestor: TrieNode, node: TrieNode, counted: tuple[bool, ...]) -> None:
        metrics.node_accesses += 1
        if node.kind is NodeKind.REAL:
            ancestor = node
            derived = tuple(o in (ORIGIN_DEFAULT, ORIGIN_SYNTH) for o in node.origins)
            if any(derived) and not all(derived):
                metrics.comparisons += 1
                report.leak_points.append(
                    LeakPoint(node.prefix, tuple(node.hops), derived)  # type: ignore[arg-type]
                )
                fresh = tuple(
                    c or d for c, d in zip(counted, derived)
                )
                for i, (already, d) in enumerate(zip(counted, derived)):
                    if d and not already:
                        counts[i] += 1  # a new maximal leaking subtree for table i
                counted = fresh
        for child in (node.left, node.right):
            if child is not None:
                if child.kind is NodeKind.REAL:
                    inherit_next_hops(ancestor, child)
                walk(ancestor, child, counted)

    start = time.perf_counter()
    walk(trie.root, trie.root, tuple([False] * trie.table_count))
    metrics.verify_time += time.perf_counter() - start
    report.leaking_routes_per_table = tuple(counts)
    return report


def merge_super(tables: list[FibTable]) -> FibTable:
    """Union of all tables' prefixes into one covering table.

    Where several tables carry the same prefix the hop of the lowest-index
    table wins; only prefix presence matters for routing-space coverage.
    """
    width = require_same_width(tables)
    merged: dict[Prefix, int] = {}
    for table in tables:
        for entry in table.entries:
            merged.setdefault(entry.prefix, entry.nexthop)
    entries = [
        FibEntry(p, merged[p]) for p in sorted(merged, key=lambda p: (p.length, p.value))
    ]
    return FibTable(width, entries, name="super")
