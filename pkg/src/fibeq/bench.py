"""Benchmark harness: run the verifiers side by side and report metrics.

Counters are deterministic per input; only the timing fields vary, so
repeats are aggregated as medians of the times while everything else is
taken from the first run (and cross-checked against the others). Results
can go to JSON, to a CSV file, and to bar-chart figures rendered next to
the CSV.
"""
from __future__ import annotations

import csv
import statistics
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .baselines import normalization_verify, taco_verify
from .model import FibTable, TableConfigError
from .report import metrics_dict, report_to_dict
from .verify import verify

ALGORITHMS = ("veritable", "taco", "normalization")


def run_algorithm(name: str, tables: list[FibTable]) -> dict:
    """One JSON-shaped result for one algorithm over the table set.

    The baselines compare two tables at a time; for n > 2 they run every
    ordered pair (n*(n-1) tree-to-tree comparisons) and their metrics are
    summed, which is exactly why they scale badly.
    """
    if name == "veritable":
        return report_to_dict(verify(tables))
    if name not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {name!r}")
    runner = taco_verify if name == "taco" else normalization_verify
    if len(tables) == 2:
        return report_to_dict(runner(tables[0], tables[1]))
    reports = [
        runner(tables[i], tables[j])
        for i in range(len(tables))
        for j in range(len(tables))
        if i != j
    ]
    merged = reports[0]
    doc = report_to_dict(merged)
    metrics = doc["metrics"]
    for rep in reports[1:]:
        other = metrics_dict(rep.metrics, name, rep.census, 2)
        for key in ("node_accesses", "comparisons", "nodes_allocated", "build_ms",
                    "verify_ms", "nodes_real", "nodes_glue", "est_memory_bytes"):
            metrics[key] += other[key]
    doc["tables"] = [t.name or f"table{i + 1}" for i, t in enumerate(tables)]
    doc["verdict"] = (
        "equivalent" if all(r.equivalent for r in reports) else "not-equivalent"
    )
    doc["pairwise_runs"] = len(reports)
    doc["divergences"] = []  # per-pair records are not comparable across pairs
    return doc


def run_bench(tables: list[FibTable], algorithms: list[str], repeats: int = 1) -> list[dict]:
    if len(tables) < 2:
        raise TableConfigError("bench needs at least two tables")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    rows = []
    for name in algorithms:
        runs = [run_algorithm(name, tables) for _ in range(repeats)]
        doc = runs[0]
        for other in runs[1:]:
            for key in ("node_accesses", "comparisons", "nodes_real", "nodes_glue"):
                if other["metrics"][key] != doc["metrics"][key]:
                    raise AssertionError(
                        f"{name}: counter {key} varied across repeats; inputs not deterministic?"
                    )
        doc["metrics"]["build_ms"] = round(
            statistics.median(r["metrics"]["build_ms"] for r in runs), 3
        )
        doc["metrics"]["verify_ms"] = round(
            statistics.median(r["metrics"]["verify_ms"] for r in runs), 3
        )
        doc["repeats"] = repeats
        comparisons = doc["metrics"]["comparisons"]
        doc["metrics"]["accesses_per_comparison"] = round(
            doc["metrics"]["node_accesses"] / comparisons, 4
        ) if comparisons else 0.0
        rows.append(doc)
    return rows


CSV_FIELDS = [
    "algorithm",
    "verdict",
    "build_ms",
    "verify_ms",
    "node_accesses",
    "comparisons",
    "accesses_per_comparison",
    "nodes_real",
    "nodes_glue",
    "est_memory_bytes",
]


def write_csv(rows: list[dict], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for row in rows:
            record = {"algorithm": row["algorithm"], "verdict": row["verdict"]}
            record.update({k: row["metrics"][k] for k in CSV_FIELDS[2:]})
            writer.writerow(record)


_FIGURES = [
    ("build_ms", "Structure build time", "ms"),
    ("verify_ms", "Verification time", "ms"),
    ("accesses_per_comparison", "Node accesses per comparison", "accesses"),
    ("est_memory_bytes", "Estimated memory", "bytes"),
]


def render_figures(rows: list[dict], out_dir: Path) -> list[Path]:
    """One bar chart per headline metric, written as PNG files."""
    out_dir.mkdir(parents=True, exist_ok=True)
    names = [row["algorithm"] for row in rows]
    written = []
    for key, title, unit in _FIGURES:
        values = [row["metrics"][key] for row in rows]
        fig, ax = plt.subplots(figsize=(5.0, 3.2))
        bars = ax.bar(names, values, color=["#2b6cb0", "#c05621", "#6b46c1"][: len(names)])
        ax.set_title(title)
        ax.set_ylabel(unit)
        ax.bar_label(bars, fmt="%.3g", padding=2, fontsize=8)
        ax.spines["top"].set_visible(False)
        ax.spines["right"].set_visible(False)
        fig.tight_layout()
        path = out_dir / f"{key}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written


def write_outputs(rows: list[dict], out_dir: Path) -> list[Path]:
    """CSV plus figures, side by side in one directory."""
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "bench.csv"
    write_csv(rows, csv_path)
    return [csv_path] + render_figures(rows, out_dir)
