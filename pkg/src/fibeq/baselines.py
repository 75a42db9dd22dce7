"""Reference two-table verifiers built on one-bit-per-level binary trees.

Two classic approaches, kept faithful rather than fast, used to cross-check
verdicts and as performance comparison baselines:

* taco: leaf-push both trees, then run two kinds of comparisons: direct
  ones where both trees have a leaf at the same prefix, and per-region
  lookups (walks from the other tree's root) where the leaf partitions
  disagree. Every maximal non-common region is compared exactly once.
* normalization: leaf-push, merge equal-hop sibling leaves to the unique
  canonical form, then compare the two canonical trees side by side.
"""
from __future__ import annotations

import time
from typing import Iterator, Optional

from .model import (
    FibTable,
    MetricsContext,
    Prefix,
    SYNTHESIZED_DEFAULT_HOP,
    require_same_width,
)
from .verify import DivergenceRecord, VerificationReport


class BinaryTreeNode:
    """Node of a plain binary prefix tree (parent/child lengths differ by 1).

    `original` marks nodes whose hop came from a table entry, as opposed to
    structure created by path expansion or leaf pushing. `from_default`
    marks leaves whose pushed hop descends from the root's default route.
    """

    __slots__ = ("left", "right", "nexthop", "original", "from_default")

    def __init__(self):
        self.left: Optional[BinaryTreeNode] = None
        self.right: Optional[BinaryTreeNode] = None
        self.nexthop: int | None = None
        self.original = False
        self.from_default = False

    def is_leaf(self) -> bool:
        return self.left is None and self.right is None


def build_bt(table: FibTable, metrics: MetricsContext | None = None) -> BinaryTreeNode:
    """One node per distinct prefix on every root-to-entry path."""
    root = BinaryTreeNode()
    allocated = 1
    for entry in table.entries:
        node = root
        p = entry.prefix
        for i in range(p.length):
            if p.bit(i) == 0:
                if node.left is None:
                    node.left = BinaryTreeNode()
                    allocated += 1
                node = node.left
            else:
                if node.right is None:
                    node.right = BinaryTreeNode()
                    allocated += 1
                node = node.right
        node.nexthop = entry.nexthop  # duplicates: last one wins
        node.original = True
    if metrics is not None:
        metrics.nodes_allocated += allocated
    return root


def bt_size(root: BinaryTreeNode) -> int:
    count = 0
    stack = [root]
    while stack:
        node = stack.pop()
        count += 1
        if node.left is not None:
            stack.append(node.left)
        if node.right is not None:
            stack.append(node.right)
    return count


def bt_census(root: BinaryTreeNode) -> tuple[int, int]:
    """(entry-backed nodes, structural nodes)."""
    original = total = 0
    stack = [root]
    while stack:
        node = stack.pop()
        total += 1
        original += node.original
        if node.left is not None:
            stack.append(node.left)
        if node.right is not None:
            stack.append(node.right)
    return original, total - original


def leaf_push(root: BinaryTreeNode, metrics: MetricsContext | None = None) -> bool:
    """Make the tree full and give every leaf its effective next hop.

    The hop of a leaf is inherited from the nearest entry-bearing ancestor;
    entry hops on internal nodes are kept for provenance but the semantics
    live at the leaves afterwards. Returns True when the root had no route
    and the default had to be synthesized. Idempotent.
    """
    synthesized = False
    if root.nexthop is None:
        root.nexthop = SYNTHESIZED_DEFAULT_HOP
        synthesized = True
    allocated = 0

    def push(node: BinaryTreeNode, hop: int, fd: bool) -> None:
        nonlocal allocated
        if node.original:
            hop, fd = node.nexthop, False
        if node.is_leaf():
            node.nexthop = hop
            node.from_default = fd
            return
        if node.left is None:
            node.left = BinaryTreeNode()
            allocated += 1
        if node.right is None:
            node.right = BinaryTreeNode()
            allocated += 1
        push(node.left, hop, fd)
        push(node.right, hop, fd)

    if root.is_leaf():
        root.from_default = True  # a default-only table stays a single leaf
    else:
        if root.left is None:
            root.left = BinaryTreeNode()
            allocated += 1
        if root.right is None:
            root.right = BinaryTreeNode()
            allocated += 1
        # the root's own hop is the default route, whether real or made up
        push(root.left, root.nexthop, True)
        push(root.right, root.nexthop, True)
    if metrics is not None:
        metrics.nodes_allocated += allocated
    return synthesized


def bt_leaves(
    root: BinaryTreeNode, metrics: MetricsContext | None = None
) -> Iterator[tuple[int, int, int, bool]]:
    """Yield (value, length, hop, from_default) per leaf, counting accesses."""
    stack: list[tuple[BinaryTreeNode, int, int]] = [(root, 0, 0)]
    while stack:
        node, value, length = stack.pop()
        if metrics is not None:
            metrics.node_accesses += 1
        if node.is_leaf():
            yield value, length, node.nexthop, node.from_default
            continue
        stack.append((node.right, (value << 1) | 1, length + 1))
        stack.append((node.left, value << 1, length + 1))


def normalize(root: BinaryTreeNode) -> None:
    """Merge equal-hop sibling leaves upward until no merge applies.

    On a leaf-pushed tree this produces the unique canonical form: two
    tables forward identically exactly when their canonical trees match.
    Idempotent.
    """

    def walk(node: BinaryTreeNode) -> None:
        if node.is_leaf():
            return
        walk(node.left)
        walk(node.right)
        l, r = node.left, node.right
        if l.is_leaf() and r.is_leaf() and l.nexthop == r.nexthop:
            node.nexthop = l.nexthop
            node.from_default = l.from_default and r.from_default
            node.left = node.right = None

    walk(root)


def trees_identical(a: BinaryTreeNode, b: BinaryTreeNode) -> bool:
    """Structural equality of canonical trees: shape plus leaf hops."""
    if a.is_leaf() != b.is_leaf():
        return False
    if a.is_leaf():
        return a.nexthop == b.nexthop
    return trees_identical(a.left, b.left) and trees_identical(a.right, b.right)


def _report(algorithm: str, t1: FibTable, t2: FibTable, metrics: MetricsContext) -> VerificationReport:
    return VerificationReport(
        algorithm=algorithm,
        width=t1.width,
        table_names=[t1.name or "table1", t2.name or "table2"],
        metrics=metrics,
    )


def _subtree_leaves(
    node: BinaryTreeNode, value: int, length: int, metrics: MetricsContext
) -> Iterator[tuple[int, int, int, bool]]:
    stack = [(node, value, length)]
    first = True
    while stack:
        n, v, ln = stack.pop()
        if not first:  # the subtree root was already accessed by the walk
            metrics.node_accesses += 1
        first = False
        if n.is_leaf():
            yield v, ln, n.nexthop, n.from_default
            continue
        stack.append((n.right, (v << 1) | 1, ln + 1))
        stack.append((n.left, v << 1, ln + 1))


def taco_verify(t1: FibTable, t2: FibTable) -> VerificationReport:
    """Two-table check via leaf-pushed trees and two comparison types."""
    require_same_width([t1, t2])
    metrics = MetricsContext()
    start = time.perf_counter()
    bt1 = build_bt(t1, metrics)
    bt2 = build_bt(t2, metrics)
    synth1 = leaf_push(bt1, metrics)
    synth2 = leaf_push(bt2, metrics)
    metrics.build_time += time.perf_counter() - start

    report = _report("taco", t1, t2, metrics)
    report.synthesized_defaults = (synth1, synth2)
    o1, g1 = bt_census(bt1)
    o2, g2 = bt_census(bt2)
    report.census = (o1 + o2, g1 + g2, o1 + g1 + o2 + g2)

    def compare(value: int, length: int, h1: int, fd1: bool, h2: int, fd2: bool) -> None:
        metrics.comparisons += 1
        if h1 != h2:
            report.divergences.append(
                DivergenceRecord(
                    Prefix(value, length), (h1, h2), (fd1 and synth1, fd2 and synth2)
                )
            )

    start = time.perf_counter()
    for value, length, hop1, fd1 in list(bt_leaves(bt1, metrics)):
        # locate the region in the other tree by walking from its root
        node = bt2
        depth = 0
        metrics.node_accesses += 1
        while depth < length and not node.is_leaf():
            bit = (value >> (length - 1 - depth)) & 1
            node = node.left if bit == 0 else node.right
            depth += 1
            metrics.node_accesses += 1
        if depth < length or node.is_leaf():
            # either a shallower leaf covers this region, or an exact common
            # leaf: one direct comparison at the finer prefix
            compare(value, length, hop1, fd1, node.nexthop, node.from_default)
        else:
            # this tree-1 leaf spans several tree-2 leaves
            for v2, l2, hop2, fd2 in _subtree_leaves(node, value, length, metrics):
                compare(v2, l2, hop1, fd1, hop2, fd2)
    metrics.verify_time += time.perf_counter() - start
    return report


def normalization_verify(t1: FibTable, t2: FibTable) -> VerificationReport:
    """Two-table check by comparing canonical (normalized) trees in lockstep."""
    require_same_width([t1, t2])
    metrics = MetricsContext()
    start = time.perf_counter()
    bt1 = build_bt(t1, metrics)
    bt2 = build_bt(t2, metrics)
    synth1 = leaf_push(bt1, metrics)
    synth2 = leaf_push(bt2, metrics)
    normalize(bt1)
    normalize(bt2)
    metrics.build_time += time.perf_counter() - start

    report = _report("normalization", t1, t2, metrics)
    report.synthesized_defaults = (synth1, synth2)
    o1, g1 = bt_census(bt1)
    o2, g2 = bt_census(bt2)
    report.census = (o1 + o2, g1 + g2, o1 + g1 + o2 + g2)

    def compare(value: int, length: int, h1: int, fd1: bool, h2: int, fd2: bool) -> None:
        metrics.comparisons += 1
        if h1 != h2:
            report.divergences.append(
                DivergenceRecord(
                    Prefix(value, length), (h1, h2), (fd1 and synth1, fd2 and synth2)
                )
            )

    def against_constant(
        node: BinaryTreeNode, value: int, length: int, hop: int, fd: bool, flipped: bool
    ) -> None:
        # one side already bottomed out in a leaf; sweep the other subtree
        stack = [(node, value, length)]
        while stack:
            n, v, ln = stack.pop()
            metrics.node_accesses += 1
            if n.is_leaf():
                if flipped:
                    compare(v, ln, n.nexthop, n.from_default, hop, fd)
                else:
                    compare(v, ln, hop, fd, n.nexthop, n.from_default)
                continue
            stack.append((n.right, (v << 1) | 1, ln + 1))
            stack.append((n.left, v << 1, ln + 1))

    def lockstep(n1: BinaryTreeNode, n2: BinaryTreeNode, value: int, length: int) -> None:
        metrics.node_accesses += 2
        leaf1, leaf2 = n1.is_leaf(), n2.is_leaf()
        if leaf1 and leaf2:
            compare(value, length, n1.nexthop, n1.from_default, n2.nexthop, n2.from_default)
        elif leaf1:
            against_constant(n2, value, length, n1.nexthop, n1.from_default, flipped=False)
        elif leaf2:
            against_constant(n1, value, length, n2.nexthop, n2.from_default, flipped=True)
        else:
            lockstep(n1.left, n2.left, value << 1, length + 1)
            lockstep(n1.right, n2.right, (value << 1) | 1, length + 1)

    start = time.perf_counter()
    lockstep(bt1, bt2, 0, 0)
    metrics.verify_time += time.perf_counter() - start
    return report
