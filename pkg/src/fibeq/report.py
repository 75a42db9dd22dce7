"""Report rendering: JSON documents (stable schema) and human-readable text.

Memory figures come from an explicit per-node size model rather than
process RSS, so they are reproducible across machines; peak RSS is
reported alongside, clearly labeled, where the platform exposes it.
"""
from __future__ import annotations

import json
import resource
import sys

from .model import MetricsContext
from .spacecheck import LeakReport
from .tableio import format_prefix
from .verify import VerificationReport

TOOL_NAME = "fibeq"

# Size model, bytes per materialized node. A trie node holds three node
# references, the prefix, a kind tag, and one (hop, origin) pair per table;
# a binary-tree node holds two references, one hop, and two flags.
TRIE_NODE_BASE_BYTES = 56
TRIE_SLOT_BYTES = 9
BT_NODE_BYTES = 40


def estimated_memory_bytes(algorithm: str, census_total: int, table_count: int) -> int:
    if algorithm in ("taco", "normalization"):
        return census_total * BT_NODE_BYTES
    return census_total * (TRIE_NODE_BASE_BYTES + TRIE_SLOT_BYTES * table_count)


def peak_rss_bytes() -> int | None:
    """Max resident set size of this process, if the platform reports it."""
    try:
        rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    except (ValueError, OSError):  # pragma: no cover
        return None
    # ru_maxrss is kilobytes on Linux, bytes on macOS
    return rss * (1 if sys.platform == "darwin" else 1024)


def metrics_dict(
    metrics: MetricsContext, algorithm: str, census: tuple[int, int, int], table_count: int
) -> dict:
    real, glue, total = census
    return {
        "node_accesses": metrics.node_accesses,
        "comparisons": metrics.comparisons,
        "nodes_allocated": metrics.nodes_allocated,
        "build_ms": round(metrics.build_time * 1000.0, 3),
        "verify_ms": round(metrics.verify_time * 1000.0, 3),
        "nodes_real": real,
        "nodes_glue": glue,
        "est_memory_bytes": estimated_memory_bytes(algorithm, total, table_count),
    }


def report_to_dict(report: VerificationReport) -> dict:
    return {
        "tool": TOOL_NAME,
        "algorithm": report.algorithm,
        "verdict": "equivalent" if report.equivalent else "not-equivalent",
        "exhaustive": report.exhaustive,
        "width": report.width,
        "tables": list(report.table_names),
        "synthesized_defaults": list(report.synthesized_defaults),
        "divergences": [
            {
                "prefix": format_prefix(d.prefix, report.width),
                "hops": list(d.hops),
                "synthesized": list(d.synthesized),
            }
            for d in report.divergences
        ],
        "metrics": metrics_dict(
            report.metrics, report.algorithm, report.census, report.table_count
        ),
    }


def leaks_to_dict(report: LeakReport) -> dict:
    return {
        "tool": TOOL_NAME,
        "algorithm": "spacecheck",
        "verdict": "consistent" if report.clean else "leaks-found",
        "width": report.width,
        "tables": list(report.table_names),
        "synthesized_defaults": list(report.synthesized_defaults),
        "leak_points": [
            {
                "prefix": format_prefix(p.prefix, report.width),
                "hops": list(p.hops),
                "default_derived": list(p.default_derived),
            }
            for p in report.leak_points
        ],
        "leaking_routes_per_table": list(report.leaking_routes_per_table),
        "metrics": metrics_dict(report.metrics, "spacecheck", report.census, len(report.table_names)),
    }


def to_json(doc: dict | list, include_rss: bool = False) -> str:
    if include_rss and isinstance(doc, dict):
        rss = peak_rss_bytes()
        if rss is not None:
            doc = dict(doc)
            doc.setdefault("metrics", {})
            doc["metrics"] = dict(doc["metrics"], process_peak_rss_bytes=rss)
    return json.dumps(doc, indent=2, sort_keys=False)


def render_human(report: VerificationReport) -> str:
    m = report.metrics
    real, glue, total = report.census
    verdict = "EQUIVALENT" if report.equivalent else "NOT EQUIVALENT"
    if report.equivalent and not report.exhaustive:
        verdict += " (spot check only: no disagreement found)"
    lines = [
        f"verdict: {verdict}",
        f"algorithm: {report.algorithm}   width: {report.width}   "
        f"tables: {', '.join(report.table_names)}",
        f"nodes: {total} ({real} real / {glue} glue)   "
        f"est. memory: {estimated_memory_bytes(report.algorithm, total, report.table_count)} B",
        f"build: {m.build_time * 1000:.3f} ms   verify: {m.verify_time * 1000:.3f} ms   "
        f"node accesses: {m.node_accesses}   comparisons: {m.comparisons}",
    ]
    if any(report.synthesized_defaults):
        missing = [
            name
            for name, synth in zip(report.table_names, report.synthesized_defaults)
            if synth
        ]
        lines.append(f"synthesized default route (hop 0) for: {', '.join(missing)}")
    if report.divergences:
        lines.append(f"divergences ({len(report.divergences)}):")
        for d in report.divergences:
            hops = ", ".join(
                f"{hop}{'*' if synth else ''}" for hop, synth in zip(d.hops, d.synthesized)
            )
            lines.append(f"  {format_prefix(d.prefix, report.width)}  hops: {hops}")
        if any(any(d.synthesized) for d in report.divergences):
            lines.append("  (* next hop comes from a synthesized default route)")
    return "\n".join(lines)


def render_leaks_human(report: LeakReport) -> str:
    lines = [
        f"verdict: {'CONSISTENT ROUTING SPACE' if report.clean else 'ROUTING SPACE LEAKS FOUND'}",
        f"width: {report.width}   tables: {', '.join(report.table_names)}",
    ]
    if report.leak_points:
        lines.append(f"leak points ({len(report.leak_points)}):")
        for p in report.leak_points:
            marks = ", ".join(
                f"{name}:{'default' if dd else 'specific'}({hop})"
                for name, hop, dd in zip(report.table_names, p.hops, p.default_derived)
            )
            lines.append(f"  {format_prefix(p.prefix, report.width)}  {marks}")
    lines.append(
        "leaking route subtrees per table: "
        + ", ".join(
            f"{name}={n}"
            for name, n in zip(report.table_names, report.leaking_routes_per_table)
        )
    )
    return "\n".join(lines)
