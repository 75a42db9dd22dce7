"""Core value types: bit-string prefixes, forwarding tables, run metrics.

All types here are width-generic: a run fixes one address width W (1..128)
and every prefix/address in that run lives in the same W-bit space. An
address is simply a prefix of length exactly W.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

MIN_WIDTH = 1
MAX_WIDTH = 128

#: Next hop used when a table has no default route and one is synthesized.
SYNTHESIZED_DEFAULT_HOP = 0


class MalformedEntryError(ValueError):
    """A table entry is invalid for its table (e.g. prefix longer than the width)."""

    def __init__(self, message: str, *, index: int | None = None):
        super().__init__(message)
        self.index = index


class TableConfigError(ValueError):
    """Tables passed to one run are inconsistent (mixed widths, too few tables, ...)."""


def check_width(width: int) -> int:
    if not isinstance(width, int) or not MIN_WIDTH <= width <= MAX_WIDTH:
        raise TableConfigError(
            f"address width must be an integer in [{MIN_WIDTH}, {MAX_WIDTH}], got {width!r}"
        )
    return width


@dataclass(frozen=True, slots=True)
class Prefix:
    """An MSB-first bit string of `length` bits, stored as an integer.

    `value` holds exactly the prefix bits (0 <= value < 2**length), so bits
    beyond `length` cannot exist; the zero-length prefix is Prefix(0, 0).
    """

    value: int
    length: int

    def __post_init__(self):
        if self.length < 0 or self.length > MAX_WIDTH:
            raise ValueError(f"prefix length {self.length} out of range")
        if not 0 <= self.value < (1 << self.length) and self.length != 0:
            raise ValueError(f"prefix value {self.value} does not fit in {self.length} bits")
        if self.length == 0 and self.value != 0:
            raise ValueError("zero-length prefix must have value 0")

    @classmethod
    def from_bits(cls, bits: str) -> "Prefix":
        """Parse a literal bit string like "0110" ("" is the default prefix)."""
        if bits and set(bits) - {"0", "1"}:
            raise ValueError(f"invalid bit string {bits!r}")
        return cls(int(bits, 2) if bits else 0, len(bits))

    @property
    def bits(self) -> str:
        return format(self.value, f"0{self.length}b") if self.length else ""

    def bit(self, i: int) -> int:
        """Bit at MSB-first position i (0-based)."""
        return (self.value >> (self.length - 1 - i)) & 1

    def is_prefix_of(self, other: "Prefix") -> bool:
        """True iff the first `self.length` bits of `other` equal this prefix."""
        return self.length <= other.length and (
            other.value >> (other.length - self.length)
        ) == self.value

    def common_prefix_length(self, other: "Prefix") -> int:
        """Length of the longest shared leading bit run of the two prefixes."""
        m = min(self.length, other.length)
        a = self.value >> (self.length - m)
        b = other.value >> (other.length - m)
        diff = a ^ b
        return m - diff.bit_length()

    def truncated(self, k: int) -> "Prefix":
        """First k bits of this prefix."""
        if k > self.length:
            raise ValueError(f"cannot truncate /{self.length} prefix to {k} bits")
        return Prefix(self.value >> (self.length - k), k)

    def address_range(self, width: int) -> tuple[int, int]:
        """Inclusive [lo, hi] range of W-bit addresses covered by this prefix."""
        lo = self.value << (width - self.length)
        return lo, lo + (1 << (width - self.length)) - 1

    def __str__(self) -> str:
        return f"{self.bits}/{self.length}"


#: The zero-length prefix 0/0 that covers the whole address space.
DEFAULT_PREFIX = Prefix(0, 0)


@dataclass(frozen=True, slots=True)
class FibEntry:
    prefix: Prefix
    nexthop: int

    def __post_init__(self):
        if self.nexthop < 0:
            raise MalformedEntryError(f"next hop must be non-negative, got {self.nexthop}")


@dataclass
class FibTable:
    """One router's forwarding table: ordered (prefix -> next hop) entries.

    Instances are treated as immutable once built; transformations return
    new tables. Entry validity against `width` is enforced by
    `canonicalize_table` (the ingestion gate), not by construction.
    """

    width: int
    entries: list[FibEntry]
    name: str = ""

    def __post_init__(self):
        check_width(self.width)

    def has_default(self) -> bool:
        return any(e.prefix.length == 0 for e in self.entries)

    def default_hop(self) -> int | None:
        hop = None
        for e in self.entries:
            if e.prefix.length == 0:
                hop = e.nexthop  # last one wins, like canonicalize
        return hop

    def __len__(self) -> int:
        return len(self.entries)


def canonicalize_table(table: FibTable) -> tuple[FibTable, int]:
    """Validate entries and collapse duplicate prefixes (last occurrence wins).

    Returns the canonical table and the number of collapsed duplicates.
    Raises MalformedEntryError if an entry's prefix is longer than the width.
    """
    seen: dict[Prefix, int] = {}
    for i, entry in enumerate(table.entries):
        if entry.prefix.length > table.width:
            raise MalformedEntryError(
                f"entry {i + 1}: prefix /{entry.prefix.length} longer than width {table.width}",
                index=i,
            )
        seen[entry.prefix] = entry.nexthop
    duplicates = len(table.entries) - len(seen)
    if duplicates == 0:
        return table, 0
    entries = [FibEntry(p, h) for p, h in seen.items()]
    return replace(table, entries=entries), duplicates


def require_same_width(tables: list[FibTable]) -> int:
    if not tables:
        raise TableConfigError("at least one table is required")
    width = tables[0].width
    for t in tables[1:]:
        if t.width != width:
            raise TableConfigError(
                f"mixed widths: {t.name or 'table'} has width {t.width}, expected {width}"
            )
    return width


@dataclass
class MetricsContext:
    """Counters for one run. Owned by a single run; never shared across threads.

    Counters only ever increase while a run is in flight; times are in seconds.
    """

    node_accesses: int = 0
    comparisons: int = 0
    nodes_allocated: int = 0
    build_time: float = 0.0
    verify_time: float = 0.0

    def as_dict(self) -> dict:
        return {
            "node_accesses": self.node_accesses,
            "comparisons": self.comparisons,
            "nodes_allocated": self.nodes_allocated,
            "build_ms": self.build_time * 1000.0,
            "verify_ms": self.verify_time * 1000.0,
        }
