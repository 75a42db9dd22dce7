"""Table files: one "prefix/length nexthop" entry per line.

Prefix notation depends on the address width: dotted-quad for 32, colon-hex
for 128, a literal bit string for anything else. "0/0" is the default route
at every width. '#' starts a comment; blank lines are skipped; LF and CRLF
both work.
"""
from __future__ import annotations

import ipaddress
import os
import warnings
from pathlib import Path
from typing import IO

from .model import (
    DEFAULT_PREFIX,
    FibEntry,
    FibTable,
    MalformedEntryError,
    Prefix,
    canonicalize_table,
    check_width,
)


class ParseError(ValueError):
    def __init__(self, message: str, *, source: str = "", line: int | None = None):
        where = f"{source or 'input'}" + (f":{line}" if line is not None else "")
        super().__init__(f"{where}: {message}")
        self.source = source
        self.line = line


def _infer_width(text: str) -> int | None:
    """Guess the width from the prefix notation, if the notation allows it."""
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        token = line.split()[0]
        if token == "0/0":
            continue  # width-agnostic; keep looking
        if "." in token:
            return 32
        if ":" in token:
            return 128
        return None  # raw bit strings carry no width
    return None


def parse_prefix(text: str, width: int | None = None) -> tuple[Prefix, int]:
    """Parse one prefix token; returns (prefix, width it implies).

    Dotted-quad implies width 32 and colon-hex 128; raw bit strings need an
    explicit width. "0/0" is accepted at any width.
    """
    if text == "0/0":
        if width is None:
            raise ValueError("width required: '0/0' alone does not imply one")
        return DEFAULT_PREFIX, width
    if "/" not in text:
        raise ValueError(f"missing '/length' in prefix {text!r}")
    base, _, length_text = text.rpartition("/")
    try:
        length = int(length_text)
    except ValueError:
        raise ValueError(f"invalid prefix length {length_text!r}") from None

    if "." in base:
        net = ipaddress.IPv4Network(text, strict=True)
        inferred = 32
        value = int(net.network_address) >> (32 - net.prefixlen) if net.prefixlen else 0
        prefix = Prefix(value, net.prefixlen)
    elif ":" in base:
        net = ipaddress.IPv6Network(text, strict=True)
        inferred = 128
        value = int(net.network_address) >> (128 - net.prefixlen) if net.prefixlen else 0
        prefix = Prefix(value, net.prefixlen)
    else:
        if width is None:
            raise ValueError("width required for raw bit-string prefixes")
        if base == "" or set(base) - {"0", "1"}:
            raise ValueError(f"invalid bit string {base!r}")
        if len(base) != length:
            raise ValueError(
                f"bit string {base!r} has {len(base)} bits but declares /{length}"
            )
        inferred = width
        prefix = Prefix.from_bits(base)

    if width is not None and inferred != width:
        raise ValueError(f"prefix {text!r} implies width {inferred}, expected {width}")
    if prefix.length > inferred:
        raise ValueError(f"prefix length {prefix.length} exceeds width {inferred}")
    return prefix, inferred


def format_prefix(prefix: Prefix, width: int) -> str:
    if prefix.length == 0:
        return "0/0"
    if width == 32:
        addr = ipaddress.IPv4Address(prefix.value << (32 - prefix.length))
        return f"{addr}/{prefix.length}"
    if width == 128:
        addr = ipaddress.IPv6Address(prefix.value << (128 - prefix.length))
        return f"{addr.compressed}/{prefix.length}"
    return f"{prefix.bits}/{prefix.length}"


def parse_table(
    source: str | os.PathLike | IO[str],
    width: int | None = None,
    name: str | None = None,
) -> FibTable:
    """Read and canonicalize one table (duplicates collapse with a warning)."""
    if isinstance(source, (str, os.PathLike)):
        path = Path(source)
        text = path.read_text(encoding="utf-8")
        label = str(path)
        if name is None:
            name = path.stem
    else:
        text = source.read()
        label = getattr(source, "name", "<stream>")

    if width is not None:
        check_width(width)
    else:
        width = _infer_width(text)

    entries: list[FibEntry] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("# table:") and name is None:
            name = stripped.split(":", 1)[1].strip()
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(
                f"expected 'prefix/length nexthop', got {line!r}", source=label, line=lineno
            )
        prefix_text, hop_text = fields
        try:
            prefix, width = parse_prefix(prefix_text, width)
        except (ValueError, ipaddress.AddressValueError, ipaddress.NetmaskValueError) as exc:
            raise ParseError(str(exc), source=label, line=lineno) from None
        try:
            hop = int(hop_text)
        except ValueError:
            raise ParseError(f"invalid next hop {hop_text!r}", source=label, line=lineno) from None
        if hop < 0:
            raise ParseError(f"next hop must be non-negative, got {hop}", source=label, line=lineno)
        entries.append(FibEntry(prefix, hop))

    if width is None:
        raise ParseError(
            "width not given and not inferable (empty table or raw bit strings)",
            source=label,
        )
    table = FibTable(width, entries, name=name or "table")
    try:
        table, duplicates = canonicalize_table(table)
    except MalformedEntryError as exc:  # length checked per line above; belt and braces
        raise ParseError(str(exc), source=label) from None
    if duplicates:
        warnings.warn(f"{label}: collapsed {duplicates} duplicate prefix(es), last wins")
    return table


def serialize_table(table: FibTable) -> str:
    """Canonical text form; parse(serialize(t)) reproduces t."""
    lines = []
    if table.name:
        lines.append(f"# table: {table.name}")
    for entry in table.entries:
        lines.append(f"{format_prefix(entry.prefix, table.width)} {entry.nexthop}")
    return "\n".join(lines) + "\n"


def write_table(table: FibTable, path: str | os.PathLike) -> None:
    Path(path).write_text(serialize_table(table), encoding="utf-8")


def load_tables(paths: list[str], width: int | None) -> list[FibTable]:
    """Parse several table files that must all share one width."""
    tables = []
    for p in paths:
        tables.append(parse_table(p, width))
        if width is None:
            width = tables[-1].width
    return tables
