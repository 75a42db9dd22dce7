"""Ground truth by enumeration: naive LPM and whole-space comparison.

Deliberately independent of the trie machinery. Full enumeration paints
per-table resolution arrays over all 2**W addresses by applying entries in
ascending prefix-length order; spot checks resolve individual addresses
straight from the entry lists. Neither path is meant to be fast enough for
production lookups.
"""
from __future__ import annotations

import time
from random import Random

import numpy as np

from .model import (
    FibTable,
    MetricsContext,
    Prefix,
    SYNTHESIZED_DEFAULT_HOP,
    TableConfigError,
    require_same_width,
)
from .verify import DivergenceRecord, VerificationReport

#: Enumeration is refused above this width (use sampled_verify instead).
ENUMERATION_MAX_WIDTH = 20


def lpm_linear(table: FibTable, address: Prefix) -> int | None:
    """Longest-prefix-match by scanning every entry; None when nothing matches."""
    if address.length != table.width:
        raise ValueError(f"address must be {table.width} bits, got /{address.length}")
    best_hop = None
    best_len = -1
    for entry in table.entries:
        if entry.prefix.length >= best_len and entry.prefix.is_prefix_of(address):
            # ">=" keeps last-wins semantics for duplicate prefixes
            best_hop = entry.nexthop
            best_len = entry.prefix.length
    return best_hop


def resolution_arrays(table: FibTable, width: int) -> tuple[np.ndarray, np.ndarray]:
    """(hops, matched_lengths) over all 2**width addresses.

    matched_lengths is -1 where no entry matches; such addresses get the
    synthesized default hop. Entries are painted shortest first so longer
    prefixes overwrite, which is exactly the LPM rule.
    """
    size = 1 << width
    hops = np.full(size, SYNTHESIZED_DEFAULT_HOP, dtype=np.int64)
    lengths = np.full(size, -1, dtype=np.int16)
    for entry in sorted(table.entries, key=lambda e: e.prefix.length):
        lo, hi = entry.prefix.address_range(width)
        hops[lo : hi + 1] = entry.nexthop
        lengths[lo : hi + 1] = entry.prefix.length
    return hops, lengths


def _union_region_ids(tables: list[FibTable], width: int) -> tuple[np.ndarray, list[Prefix]]:
    """Label every address with its deepest covering prefix across all tables."""
    prefixes = sorted(
        {e.prefix for t in tables for e in t.entries} | {Prefix(0, 0)},
        key=lambda p: (p.length, p.value),
    )
    ids = np.zeros(1 << width, dtype=np.int32)
    for i, p in enumerate(prefixes):
        lo, hi = p.address_range(width)
        ids[lo : hi + 1] = i
    return ids, prefixes


def brute_force_verify(tables: list[FibTable]) -> VerificationReport:
    """Compare all tables on every single address of the space.

    Disagreeing addresses are grouped by their deepest covering union
    prefix, so divergence regions line up with what the trie-based verifier
    reports.
    """
    if len(tables) < 2:
        raise TableConfigError("verification needs at least two tables")
    width = require_same_width(tables)
    if width > ENUMERATION_MAX_WIDTH:
        raise TableConfigError(
            f"width {width} enumeration would visit 2**{width} addresses; "
            "use sampled_verify for wide address spaces"
        )

    metrics = MetricsContext()
    start = time.perf_counter()
    resolved = [resolution_arrays(t, width) for t in tables]
    hops0 = resolved[0][0]
    disagree = np.zeros(1 << width, dtype=bool)
    for hops_i, _ in resolved[1:]:
        disagree |= hops_i != hops0
    metrics.comparisons = 1 << width

    report = VerificationReport(
        algorithm="brute-force",
        width=width,
        table_names=[t.name or f"table{i + 1}" for i, t in enumerate(tables)],
        metrics=metrics,
        synthesized_defaults=tuple(not t.has_default() for t in tables),
    )
    if disagree.any():
        ids, prefixes = _union_region_ids(tables, width)
        bad = np.flatnonzero(disagree)
        region_ids, first_idx = np.unique(ids[bad], return_index=True)
        for rid, idx in zip(region_ids, first_idx):
            addr = int(bad[idx])
            report.divergences.append(
                DivergenceRecord(
                    prefixes[rid],
                    tuple(int(h[addr]) for h, _ in resolved),
                    tuple(int(l[addr]) == -1 for _, l in resolved),
                )
            )
    metrics.verify_time += time.perf_counter() - start
    return report


def disagreement_mask(tables: list[FibTable]) -> np.ndarray:
    """Boolean array over all addresses: True where some pair of tables differs."""
    width = require_same_width(tables)
    if width > ENUMERATION_MAX_WIDTH:
        raise TableConfigError(f"width {width} too wide to enumerate")
    hops = [resolution_arrays(t, width)[0] for t in tables]
    mask = np.zeros(1 << width, dtype=bool)
    for h in hops[1:]:
        mask |= h != hops[0]
    return mask


class _ByLengthIndex:
    """Per-length prefix dictionaries for O(W) single-address resolution."""

    def __init__(self, table: FibTable):
        self.width = table.width
        self.by_length: dict[int, dict[int, int]] = {}
        for e in table.entries:
            self.by_length.setdefault(e.prefix.length, {})[e.prefix.value] = e.nexthop
        self.lengths = sorted(self.by_length, reverse=True)

    def resolve(self, address: int) -> tuple[int, int]:
        """(hop, matched_length); matched_length -1 means synthesized default."""
        for length in self.lengths:
            hop = self.by_length[length].get(address >> (self.width - length))
            if hop is not None:
                return hop, length
        return SYNTHESIZED_DEFAULT_HOP, -1


def _probe_addresses(tables: list[FibTable], samples: int, seed: int) -> list[int]:
    """Deterministic probe set: every entry's region boundaries (and their
    outside neighbors, where resolution can change) plus seeded random picks."""
    width = tables[0].width
    top = (1 << width) - 1
    probes = {0, top}
    for t in tables:
        for e in t.entries:
            lo, hi = e.prefix.address_range(width)
            probes.update((lo, hi))
            if lo > 0:
                probes.add(lo - 1)
            if hi < top:
                probes.add(hi + 1)
    rng = Random(seed)
    for _ in range(samples):
        probes.add(rng.randrange(1 << width))
    return sorted(probes)


def sampled_verify(tables: list[FibTable], samples: int, seed: int) -> VerificationReport:
    """Spot-check equivalence on wide address spaces.

    Probes every entry's boundary addresses and their neighbors, plus
    `samples` seeded random addresses, so any change confined to one
    entry's region is guaranteed to be hit. The report is marked
    non-exhaustive: it can prove tables different, never identical.
    """
    if len(tables) < 2:
        raise TableConfigError("verification needs at least two tables")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    width = require_same_width(tables)

    metrics = MetricsContext()
    start = time.perf_counter()
    indexes = [_ByLengthIndex(t) for t in tables]
    union_index = _ByLengthIndex(
        FibTable(width, [e for t in tables for e in t.entries], name="union")
    )

    seen_regions: dict[tuple[int, int], DivergenceRecord] = {}
    for address in _probe_addresses(tables, samples, seed):
        resolved = [idx.resolve(address) for idx in indexes]
        metrics.comparisons += 1
        first = resolved[0][0]
        if any(hop != first for hop, _ in resolved):
            _, length = union_index.resolve(address)
            length = max(length, 0)
            region = Prefix(address >> (width - length) if length else 0, length)
            key = (region.value, region.length)
            if key not in seen_regions:
                seen_regions[key] = DivergenceRecord(
                    region,
                    tuple(hop for hop, _ in resolved),
                    tuple(matched == -1 for _, matched in resolved),
                )
    metrics.verify_time += time.perf_counter() - start

    report = VerificationReport(
        algorithm="sampled",
        width=width,
        table_names=[t.name or f"table{i + 1}" for i, t in enumerate(tables)],
        metrics=metrics,
        exhaustive=False,
        synthesized_defaults=tuple(not t.has_default() for t in tables),
    )
    report.divergences.extend(seen_regions.values())
    return report
