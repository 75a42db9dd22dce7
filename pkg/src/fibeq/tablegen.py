"""Fixture factory: random tables, equivalence-preserving aggregation, and
controlled error injection.

Everything here is a pure function of its parameters and seed.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from random import Random
from typing import Mapping, Sequence

import numpy as np

from .baselines import build_bt, leaf_push, normalize
from .model import (
    DEFAULT_PREFIX,
    FibEntry,
    FibTable,
    Prefix,
    canonicalize_table,
    check_width,
)
from .oracle import ENUMERATION_MAX_WIDTH, resolution_arrays


def default_length_weights(width: int) -> dict[int, float]:
    """Skewed toward long prefixes, loosely shaped like a real FIB histogram:
    roughly 60% in the top quartile of lengths, 30% middle, 10% short."""
    q1 = max(1, width // 4)
    q3 = max(q1, (3 * width) // 4)
    short = range(1, q1 + 1)
    middle = range(q1 + 1, q3 + 1)
    top = range(q3 + 1, width + 1)
    weights: dict[int, float] = {}
    for bucket, mass in ((short, 0.10), (middle, 0.30), (top, 0.60)):
        lengths = list(bucket)
        if lengths:
            for l in lengths:
                weights[l] = weights.get(l, 0.0) + mass / len(lengths)
    if not weights:  # width == 1 collapses every bucket into /1
        weights = {1: 1.0}
    return weights


def gen_random_table(
    width: int,
    entries: int,
    hop_count: int,
    seed: int,
    *,
    length_weights: Mapping[int, float] | None = None,
    block_bits: int | None = None,
    block_count: int | None = None,
    name: str | None = None,
) -> FibTable:
    """Deterministic random table: a 0/0 default route plus `entries`
    distinct random prefixes with hops in 1..hop_count.

    `length_weights` overrides the prefix-length distribution. When
    `block_count` is given, prefixes longer than `block_bits` share their
    leading bits with one of that many random blocks, mimicking how real
    tables cluster under allocation blocks (and keeping tree shapes sane
    at width 32).
    """
    check_width(width)
    if entries < 1:
        raise ValueError("entries must be >= 1")
    if hop_count < 1:
        raise ValueError("hop_count must be >= 1")

    weights = dict(length_weights) if length_weights else default_length_weights(width)
    weights = {l: w for l, w in weights.items() if w > 0}
    if any(l < 1 or l > width for l in weights):
        raise ValueError("length weights must cover lengths in 1..width only")
    available = sum(1 << l for l in weights)
    if entries > available:
        raise ValueError(
            f"cannot draw {entries} distinct prefixes: only {available} exist "
            f"for the supported lengths"
        )

    rng = Random(seed)
    lengths = sorted(weights)
    length_w = [weights[l] for l in lengths]
    blocks: list[int] | None = None
    if block_count is not None:
        bits = block_bits if block_bits is not None else max(1, width // 2)
        blocks = [rng.randrange(1 << bits) for _ in range(block_count)]
        block_bits = bits

    chosen: set[Prefix] = set()
    picked: list[FibEntry] = [FibEntry(DEFAULT_PREFIX, rng.randint(1, hop_count))]
    budget = 200 * entries + 1000
    while len(chosen) < entries:
        if budget <= 0:
            raise ValueError(
                f"gave up drawing {entries} distinct prefixes after repeated collisions"
            )
        budget -= 1
        length = rng.choices(lengths, weights=length_w)[0]
        if blocks is not None and length > block_bits:
            high = rng.choice(blocks)
            value = (high << (length - block_bits)) | rng.randrange(1 << (length - block_bits))
        else:
            value = rng.randrange(1 << length)
        p = Prefix(value, length)
        if p in chosen:
            continue
        chosen.add(p)
        picked.append(FibEntry(p, rng.randint(1, hop_count)))

    return FibTable(width, picked, name=name or f"rand-w{width}-s{seed}")


def aggregate_equiv(table: FibTable) -> FibTable:
    """Shrink a table without changing any address's forwarding.

    Resolves effective hops on the table's leaf-pushed tree, merges
    equal-hop sibling regions to the canonical form, then re-emits entries
    top-down, keeping the inherited hop wherever the subtree allows it so
    that redundant and nested same-hop routes disappear. Falls back to the
    input when that would not shrink, making the result never larger.
    """
    if not table.has_default():
        raise ValueError("aggregation requires a 0/0 default route")
    canonical, _ = canonicalize_table(table)

    bt = build_bt(canonical)
    leaf_push(bt)
    normalize(bt)

    # candidate hops per subtree: any member can cover the subtree with the
    # fewest exceptions (children's intersection when possible, else union)
    candidates: dict[int, frozenset[int]] = {}

    def tally(node) -> frozenset[int]:
        if node.is_leaf():
            cand = frozenset((node.nexthop,))
        else:
            left, right = tally(node.left), tally(node.right)
            cand = (left & right) or (left | right)
        candidates[id(node)] = cand
        return cand

    tally(bt)
    entries: list[FibEntry] = []

    def emit(node, value: int, length: int, inherited: int | None) -> None:
        cand = candidates[id(node)]
        if inherited not in cand:
            inherited = min(cand)  # deterministic pick
            entries.append(FibEntry(Prefix(value, length), inherited))
        if not node.is_leaf():
            emit(node.left, value << 1, length + 1, inherited)
            emit(node.right, (value << 1) | 1, length + 1, inherited)

    emit(bt, 0, 0, None)  # the first emit is always the 0/0 route
    if len(entries) > len(canonical.entries):
        return canonical  # nothing to gain; keep the (deduplicated) input
    entries.sort(key=lambda e: (e.prefix.length, e.prefix.value))
    return FibTable(table.width, entries, name=f"{table.name or 'table'}-agg")


@dataclass(frozen=True)
class Mutation:
    """One injected forwarding error."""

    kind: str  # "rehop" (change an entry's hop) or "insert" (add an entry)
    prefix: Prefix
    nexthop: int


class _IntervalIndex:
    """Entry address ranges sorted by start, for fast containment queries."""

    def __init__(self, entries: Sequence[FibEntry], width: int):
        self.width = width
        self.spans = sorted(
            (*e.prefix.address_range(width), e.prefix.length) for e in entries
        )
        self.starts = [s[0] for s in self.spans]

    def is_exposed(self, region: Prefix) -> bool:
        """True when strictly longer entries do not blanket `region`, i.e.
        some address in it still resolves at `region`'s level."""
        lo, hi = region.address_range(self.width)
        intervals = []
        i = bisect_left(self.starts, lo)
        while i < len(self.spans) and self.starts[i] <= hi:
            elo, ehi, elen = self.spans[i]
            if elen > region.length and ehi <= hi:
                intervals.append((elo, ehi))
            i += 1
        if not intervals:
            return True
        covered = 0
        cur_lo, cur_hi = intervals[0]
        for ilo, ihi in intervals[1:]:
            if ilo > cur_hi + 1:
                covered += cur_hi - cur_lo + 1
                cur_lo, cur_hi = ilo, ihi
            else:
                cur_hi = max(cur_hi, ihi)
        covered += cur_hi - cur_lo + 1
        return covered < hi - lo + 1


def plan_mutations(
    table: FibTable,
    k: int,
    seed: int,
    kinds: tuple[str, ...] = ("rehop", "insert"),
) -> list[Mutation]:
    """Pick k errors with pairwise-disjoint affected regions.

    Each error either rewrites an existing entry's hop or inserts a new
    entry; every chosen region is checked to really change at least one
    address (it is not fully shadowed by longer entries), and fresh hop
    values guarantee the change is visible.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    canonical, _ = canonicalize_table(table)
    entries = canonical.entries
    width = canonical.width
    existing = {e.prefix for e in entries}
    index = _IntervalIndex(entries, width)
    rng = Random(seed)
    fresh_hop = max((e.nexthop for e in entries), default=0) + 1

    rehop_candidates = (
        [e for e in entries if e.prefix.length > 0] if "rehop" in kinds else []
    )
    rng.shuffle(rehop_candidates)

    plan: list[Mutation] = []
    spans: list[tuple[int, int]] = []

    def disjoint(lo: int, hi: int) -> bool:
        return all(hi < slo or shi < lo for slo, shi in spans)

    budget = 400 * k + 2000
    while len(plan) < k and budget > 0:
        budget -= 1
        use_rehop = bool(rehop_candidates) and rng.random() < 0.5
        if use_rehop:
            entry = rehop_candidates.pop()
            region = entry.prefix
        elif "insert" in kinds:
            length = rng.randint(max(1, width // 2), width)
            region = Prefix(rng.randrange(1 << length), length)
            if region in existing:
                continue
        else:
            continue
        lo, hi = region.address_range(width)
        if not disjoint(lo, hi) or not index.is_exposed(region):
            continue
        plan.append(
            Mutation("rehop" if use_rehop else "insert", region, fresh_hop)
        )
        fresh_hop += 1
        spans.append((lo, hi))
    if len(plan) < k:
        raise ValueError(
            f"table too small or saturated to host {k} disjoint errors "
            f"(placed {len(plan)})"
        )
    return plan


def apply_mutations(table: FibTable, plan: Sequence[Mutation]) -> FibTable:
    canonical, _ = canonicalize_table(table)
    by_prefix = {m.prefix: m for m in plan if m.kind == "rehop"}
    entries = [
        FibEntry(e.prefix, by_prefix[e.prefix].nexthop) if e.prefix in by_prefix else e
        for e in canonical.entries
    ]
    entries.extend(FibEntry(m.prefix, m.nexthop) for m in plan if m.kind == "insert")
    return FibTable(table.width, entries, name=f"{table.name or 'table'}-mut")


def mutate(table: FibTable, k: int, seed: int) -> tuple[FibTable, list[Prefix]]:
    """Return a copy of `table` with k disjoint forwarding errors, plus the
    affected prefixes. At enumerable widths the injected diff is re-checked
    address-by-address against the original."""
    plan = plan_mutations(table, k, seed)
    mutated = apply_mutations(table, plan)
    if table.width <= ENUMERATION_MAX_WIDTH:
        _check_mutation_regions(table, mutated, [m.prefix for m in plan])
    return mutated, [m.prefix for m in plan]


def _check_mutation_regions(
    original: FibTable, mutated: FibTable, regions: Sequence[Prefix]
) -> None:
    width = original.width
    before = resolution_arrays(original, width)[0]
    after = resolution_arrays(mutated, width)[0]
    diff = before != after
    allowed = np.zeros(1 << width, dtype=bool)
    for region in regions:
        lo, hi = region.address_range(width)
        if not diff[lo : hi + 1].any():
            raise RuntimeError(f"injected error at {region} changed no address")
        allowed[lo : hi + 1] = True
    if (diff & ~allowed).any():
        raise RuntimeError("injected errors bled outside their regions")
