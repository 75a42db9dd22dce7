"""Joint PATRICIA trie over N forwarding tables.

One path-compressed binary trie holds the union of all tables' prefixes.
Each node carries a per-table next-hop array; a node is REAL when at least
one table contains its prefix, GLUE when it exists only to join two
diverging children. A built trie is immutable and safe for concurrent
reads; building is single-threaded.
"""
from __future__ import annotations

import enum
import time
from collections.abc import Iterator
from typing import Optional

from .model import (
    DEFAULT_PREFIX,
    FibEntry,
    FibTable,
    MalformedEntryError,
    MetricsContext,
    Prefix,
    require_same_width,
)

# Per-slot provenance of a next-hop value.
ORIGIN_ENTRY = 0  # a specific route from this table
ORIGIN_DEFAULT = 1  # the table's own 0/0 route
ORIGIN_SYNTH = 2  # a synthesized default (table had no 0/0)


class NodeKind(enum.Enum):
    REAL = "real"
    GLUE = "glue"


class TrieNode:
    __slots__ = ("parent", "left", "right", "prefix", "hops", "origins", "kind")

    def __init__(self, prefix: Prefix, table_count: int, kind: NodeKind):
        self.parent: Optional[TrieNode] = None
        self.left: Optional[TrieNode] = None
        self.right: Optional[TrieNode] = None
        self.prefix = prefix
        self.hops: list[int | None] = [None] * table_count
        self.origins: list[int] = [ORIGIN_ENTRY] * table_count
        self.kind = kind

    @property
    def length(self) -> int:
        return self.prefix.length

    def child(self, bit: int) -> Optional["TrieNode"]:
        return self.left if bit == 0 else self.right

    def set_child(self, bit: int, node: "TrieNode") -> None:
        if bit == 0:
            self.left = node
        else:
            self.right = node
        node.parent = self

    def __repr__(self) -> str:  # debugging aid
        return f"<TrieNode {self.prefix} {self.kind.value} hops={self.hops}>"


class JointTrie:
    """Root plus run-level facts (width, table count, synthesized defaults)."""

    def __init__(self, width: int, table_count: int, metrics: MetricsContext | None = None):
        self.width = width
        self.table_count = table_count
        self.root = TrieNode(DEFAULT_PREFIX, table_count, NodeKind.GLUE)
        # Filled in by verify.ensure_default_routes; True where slot i's
        # default had to be made up.
        self.synthesized_defaults: list[bool] = [False] * table_count
        if metrics is not None:
            metrics.nodes_allocated += 1

    def nodes(self) -> Iterator[TrieNode]:
        """Pre-order iteration over all nodes."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if node.right is not None:
                stack.append(node.right)
            if node.left is not None:
                stack.append(node.left)


def insert(
    trie: JointTrie,
    table_index: int,
    entry: FibEntry,
    metrics: MetricsContext | None = None,
) -> None:
    """Insert one table entry, preserving the PATRICIA shape.

    Exactly one of four things happens:
      (a) a node with the same prefix exists: its slot is set and it becomes REAL;
      (b) the new prefix sits between a node and its child: a REAL node is spliced in;
      (c) the branch is free: a REAL leaf is attached;
      (d) the new prefix diverges from an existing child: a GLUE node is created at
          their longest common prefix and adopts both.
    """
    if not 0 <= table_index < trie.table_count:
        raise IndexError(f"table index {table_index} out of range")
    p = entry.prefix
    if p.length > trie.width:
        raise MalformedEntryError(f"prefix /{p.length} longer than width {trie.width}")

    node = trie.root
    while True:
        if node.prefix == p:  # (a) update in place; a GLUE node is promoted
            node.hops[table_index] = entry.nexthop
            node.origins[table_index] = ORIGIN_DEFAULT if p.length == 0 else ORIGIN_ENTRY
            node.kind = NodeKind.REAL
            return

        # Invariant: node.prefix is a proper prefix of p. The child on p's
        # branching bit decides which case applies.
        side = p.bit(node.length)
        child = node.child(side)
        if child is None:  # (c) fresh leaf
            new = _new_real_node(trie, p, table_index, entry.nexthop, metrics)
            node.set_child(side, new)
            return

        shared = p.common_prefix_length(child.prefix)
        if shared == child.prefix.length:  # child covers p: keep walking down
            node = child
            continue

        new = _new_real_node(trie, p, table_index, entry.nexthop, metrics)
        if shared == p.length:  # (b) splice: p lies between node and child
            node.set_child(side, new)
            new.set_child(child.prefix.bit(p.length), child)
        else:  # (d) diverging siblings joined by a glue node
            glue = TrieNode(p.truncated(shared), trie.table_count, NodeKind.GLUE)
            if metrics is not None:
                metrics.nodes_allocated += 1
            node.set_child(side, glue)
            glue.set_child(p.bit(shared), new)
            glue.set_child(child.prefix.bit(shared), child)
        return


def _new_real_node(
    trie: JointTrie,
    prefix: Prefix,
    table_index: int,
    nexthop: int,
    metrics: MetricsContext | None,
) -> TrieNode:
    node = TrieNode(prefix, trie.table_count, NodeKind.REAL)
    node.hops[table_index] = nexthop
    node.origins[table_index] = ORIGIN_DEFAULT if prefix.length == 0 else ORIGIN_ENTRY
    if metrics is not None:
        metrics.nodes_allocated += 1
    return node


def build_joint_pt(
    tables: list[FibTable], metrics: MetricsContext | None = None
) -> JointTrie:
    """Build one accumulated trie from all tables, timing the build."""
    width = require_same_width(tables)
    start = time.perf_counter()
    trie = JointTrie(width, len(tables), metrics)
    for i, table in enumerate(tables):
        for entry in table.entries:
            insert(trie, i, entry, metrics)
    if metrics is not None:
        metrics.build_time += time.perf_counter() - start
    return trie


def lpm_lookup(
    trie: JointTrie, address: Prefix, metrics: MetricsContext | None = None
) -> TrieNode:
    """Deepest REAL node whose prefix covers `address` (the root if none does).

    Every node touched on the way down counts as one node access.
    """
    if address.length != trie.width:
        raise ValueError(f"address must be {trie.width} bits, got /{address.length}")
    node = trie.root
    if metrics is not None:
        metrics.node_accesses += 1
    best = node if node.kind is NodeKind.REAL else None
    while node.length < address.length:
        child = node.child(address.bit(node.length))
        if child is None:
            break
        if metrics is not None:
            metrics.node_accesses += 1
        if not child.prefix.is_prefix_of(address):
            break
        node = child
        if node.kind is NodeKind.REAL:
            best = node
    return best if best is not None else trie.root


def resolve_slot(node: TrieNode, table_index: int) -> int | None:
    """Next hop of one table at `node`, before any inheritance pass.

    Walks to the nearest REAL ancestor-or-self whose slot is set; None means
    the table has no covering entry at all (no default route).
    """
    cur: Optional[TrieNode] = node
    while cur is not None:
        if cur.kind is NodeKind.REAL and cur.hops[table_index] is not None:
            return cur.hops[table_index]
        cur = cur.parent
    return None


def node_census(trie: JointTrie) -> tuple[int, int, int]:
    """(real, glue, total) node counts."""
    real = glue = 0
    for node in trie.nodes():
        if node.kind is NodeKind.REAL:
            real += 1
        else:
            glue += 1
    return real, glue, real + glue


def trie_fingerprint(trie: JointTrie) -> tuple:
    """Order-independent structural summary used by commutativity checks."""
    rows = []
    for node in trie.nodes():
        rows.append((node.prefix.value, node.prefix.length, node.kind.value, tuple(node.hops)))
    return tuple(sorted(rows))
