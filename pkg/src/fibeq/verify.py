"""Equivalence verification by a single post-order traversal of the joint trie.

The traversal interweaves two passes: while descending, every REAL node
inherits next hops for its empty slots from its nearest REAL ancestor;
while returning, next-hop arrays are compared at leaf nodes and, wherever
children fail to cover their parent's routing space (a prefix-length gap
of more than one bit, or a missing child), a leak flag is raised and
carried up through GLUE nodes to the nearest REAL node, which is then
compared as well and clears the flag.

A trie that went through one verification run holds inherited state and is
single-use: rebuild before verifying again.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .model import (
    FibTable,
    MetricsContext,
    Prefix,
    SYNTHESIZED_DEFAULT_HOP,
    TableConfigError,
    require_same_width,
)
from .trie import (
    ORIGIN_SYNTH,
    JointTrie,
    NodeKind,
    TrieNode,
    build_joint_pt,
    node_census,
)


@dataclass(frozen=True)
class DivergenceRecord:
    """One routing region where the tables disagree.

    `prefix` is the region's longest-prefix-match prefix in the joint trie;
    `hops` holds the fully resolved next hop per table; `synthesized` marks
    hops that exist only because a missing default route was made up.
    """

    prefix: Prefix
    hops: tuple[int, ...]
    synthesized: tuple[bool, ...]


@dataclass
class VerificationReport:
    algorithm: str
    width: int
    table_names: list[str]
    metrics: MetricsContext
    divergences: list[DivergenceRecord] = field(default_factory=list)
    #: (real, glue, total) node counts of the structure(s) the run used.
    census: tuple[int, int, int] = (0, 0, 0)
    #: False for spot checks that cannot prove equivalence, only disprove it.
    exhaustive: bool = True
    synthesized_defaults: tuple[bool, ...] = ()

    @property
    def equivalent(self) -> bool:
        return not self.divergences

    @property
    def table_count(self) -> int:
        return len(self.table_names)


def ensure_default_routes(trie: JointTrie) -> None:
    """Make the root REAL with a full next-hop array.

    Tables without a 0/0 route get the synthesized default hop so that the
    whole address space is covered; those slots are flagged so reports can
    tell a real mismatch from a missing default.
    """
    root = trie.root
    for i in range(trie.table_count):
        if root.hops[i] is None:
            root.hops[i] = SYNTHESIZED_DEFAULT_HOP
            root.origins[i] = ORIGIN_SYNTH
            trie.synthesized_defaults[i] = True
    root.kind = NodeKind.REAL


def prepare(tables: list[FibTable], metrics: MetricsContext | None = None) -> JointTrie:
    """Build the joint trie for >= 2 tables and guarantee default coverage."""
    if len(tables) < 2:
        raise TableConfigError("verification needs at least two tables")
    require_same_width(tables)
    trie = build_joint_pt(tables, metrics)
    ensure_default_routes(trie)
    return trie


def inherit_next_hops(ancestor: TrieNode, node: TrieNode) -> None:
    """Fill `node`'s empty slots from its nearest REAL ancestor.

    Non-empty slots (the node's own routes) are kept. Provenance travels
    with the value, so a hop that ultimately came from a default route is
    still recognizable after any number of inheritance steps.
    """
    ah, ao = ancestor.hops, ancestor.origins
    nh, no = node.hops, node.origins
    for i, hop in enumerate(nh):
        if hop is None:
            nh[i] = ah[i]
            no[i] = ao[i]


def compare_next_hops(node: TrieNode, report: VerificationReport) -> None:
    """Compare one resolved next-hop array; record a divergence on mismatch."""
    assert node.kind is NodeKind.REAL, "only REAL nodes are ever compared"
    report.metrics.comparisons += 1
    hops = node.hops
    first = hops[0]
    for h in hops:
        if h != first:
            report.divergences.append(
                DivergenceRecord(
                    node.prefix,
                    tuple(hops),  # type: ignore[arg-type]
                    tuple(o == ORIGIN_SYNTH for o in node.origins),
                )
            )
            return


def verify_subtree(ancestor: TrieNode, node: TrieNode, report: VerificationReport) -> bool:
    """Recursive traversal; returns the leak flag handed to the parent.

    Call with (root, root) on a prepared trie. The flag is True while some
    routing space below is not yet covered by a comparison; it is always
    discharged (and cleared) at the nearest REAL node.
    """
    metrics = report.metrics
    metrics.node_accesses += 1
    if node.kind is NodeKind.REAL:
        ancestor = node

    left, right = node.left, node.right
    if left is None and right is None:
        compare_next_hops(node, report)  # leaf regions are always checked
        return False

    left_flag = right_flag = False
    if left is not None:
        if left.kind is NodeKind.REAL:
            inherit_next_hops(ancestor, left)
        left_flag = verify_subtree(ancestor, left, report)
    if right is not None:
        if right.kind is NodeKind.REAL:
            inherit_next_hops(ancestor, right)
        right_flag = verify_subtree(ancestor, right, report)

    leak = (
        left is None
        or right is None
        or left.length - node.length > 1
        or right.length - node.length > 1
        or left_flag
        or right_flag
    )
    if leak and node.kind is NodeKind.REAL:
        compare_next_hops(node, report)
        leak = False
    return leak


def run_prepared(
    trie: JointTrie,
    table_names: list[str],
    metrics: MetricsContext,
    algorithm: str = "veritable",
) -> VerificationReport:
    """Run the traversal on an already-prepared trie (consumes the trie)."""
    report = VerificationReport(
        algorithm=algorithm,
        width=trie.width,
        table_names=table_names,
        metrics=metrics,
        census=node_census(trie),
        synthesized_defaults=tuple(trie.synthesized_defaults),
    )
    start = time.perf_counter()
    leak = verify_subtree(trie.root, trie.root, report)
    metrics.verify_time += time.perf_counter() - start
    assert leak is False, "leak flag must be discharged at the REAL root"
    return report


def verify(tables: list[FibTable]) -> VerificationReport:
    """Check whether >= 2 tables forward identically for every address.

    Deterministic in everything but the timing fields.
    """
    metrics = MetricsContext()
    trie = prepare(tables, metrics)
    names = [t.name or f"table{i + 1}" for i, t in enumerate(tables)]
    return run_prepared(trie, names, metrics)
