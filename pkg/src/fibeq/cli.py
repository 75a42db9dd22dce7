"""Command-line interface.

Exit codes: 0 when tables are equivalent (or no leaks were found), 1 when a
difference was found, 2 on usage or parse errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench as bench_mod
from .model import MalformedEntryError, TableConfigError
from .report import (
    leaks_to_dict,
    render_human,
    render_leaks_human,
    report_to_dict,
    to_json,
)
from .baselines import normalization_verify, taco_verify
from .spacecheck import detect_leaks
from .tablegen import aggregate_equiv, gen_random_table, mutate
from .tableio import ParseError, format_prefix, load_tables, parse_table, write_table
from .verify import verify


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fibeq",
        description="Check whether IP forwarding tables forward identically, "
        "find where they diverge, and detect routing-space leaks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--width", type=int, default=None,
                       help="address width in bits (inferred from dotted-quad/colon-hex input)")
        p.add_argument("--output", choices=("human", "json"), default="human")
        p.add_argument("--rss", action="store_true",
                       help="include process peak RSS in JSON metrics (platform dependent)")

    p = sub.add_parser("verify", help="verify forwarding equivalence of two or more tables")
    p.add_argument("paths", nargs="+", help="table files (two or more)")
    p.add_argument("--algorithm", choices=bench_mod.ALGORITHMS, default="veritable")
    add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("blackholes", help="detect routing-space leaks between tables")
    p.add_argument("paths", nargs="+", help="table files (two or more)")
    add_common(p)
    p.set_defaults(func=cmd_blackholes)

    p = sub.add_parser("gen", help="generate a random table file")
    p.add_argument("out", help="output table file")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--entries", type=int, required=True,
                   help="number of random prefixes (a 0/0 default is always added)")
    p.add_argument("--hops", type=int, default=16, help="number of distinct next hops")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("aggregate", help="write an equivalent, smaller table")
    p.add_argument("src", help="input table file")
    p.add_argument("out", help="output table file")
    p.add_argument("--width", type=int, default=None)
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("mutate", help="inject disjoint forwarding errors into a table")
    p.add_argument("src", help="input table file")
    p.add_argument("out", help="output table file")
    p.add_argument("--errors", type=int, default=1, help="number of errors to inject")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=int, default=None)
    p.set_defaults(func=cmd_mutate)

    p = sub.add_parser(
        "bench",
        help="run the algorithms side by side; optionally write CSV and figures",
    )
    p.add_argument("paths", nargs="*", help="table files; omit to generate a pair")
    p.add_argument("--algorithm", default=",".join(bench_mod.ALGORITHMS),
                   help="comma-separated subset of: " + ", ".join(bench_mod.ALGORITHMS))
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--entries", type=int, default=None,
                   help="generate two tables with this many prefixes instead of reading files")
    p.add_argument("--hops", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--errors", type=int, default=0,
                   help="in generated mode, inject this many errors into the second table")
    p.add_argument("--out-dir", default=None,
                   help="directory for bench.csv and metric figures (PNG)")
    add_common(p)
    p.set_defaults(func=cmd_bench)
    return parser


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def cmd_verify(args: argparse.Namespace) -> int:
    if len(args.paths) < 2:
        return _fail("verify needs at least two table files")
    if args.algorithm != "veritable" and len(args.paths) != 2:
        return _fail(
            f"{args.algorithm} compares exactly two tables; n tables would need "
            "n*(n-1) tree-to-tree runs; use the bench command for that, or veritable"
        )
    tables = load_tables(args.paths, args.width)
    if args.algorithm == "veritable":
        report = verify(tables)
    elif args.algorithm == "taco":
        report = taco_verify(tables[0], tables[1])
    else:
        report = normalization_verify(tables[0], tables[1])
    if args.output == "json":
        print(to_json(report_to_dict(report), include_rss=args.rss))
    else:
        print(render_human(report))
    return 0 if report.equivalent else 1


def cmd_blackholes(args: argparse.Namespace) -> int:
    if len(args.paths) < 2:
        return _fail("blackholes needs at least two table files")
    report = detect_leaks(load_tables(args.paths, args.width))
    if args.output == "json":
        print(to_json(leaks_to_dict(report), include_rss=args.rss))
    else:
        print(render_leaks_human(report))
    return 0 if report.clean else 1


def cmd_gen(args: argparse.Namespace) -> int:
    table = gen_random_table(
        args.width, args.entries, args.hops, args.seed, name=args.name
    )
    write_table(table, args.out)
    print(f"wrote {len(table.entries)} entries to {args.out}")
    return 0


def cmd_aggregate(args: argparse.Namespace) -> int:
    table = parse_table(args.src, args.width)
    aggregated = aggregate_equiv(table)
    write_table(aggregated, args.out)
    print(
        f"aggregated {len(table.entries)} -> {len(aggregated.entries)} entries "
        f"({args.out})"
    )
    return 0


def cmd_mutate(args: argparse.Namespace) -> int:
    table = parse_table(args.src, args.width)
    mutated, prefixes = mutate(table, args.errors, args.seed)
    write_table(mutated, args.out)
    print(f"injected {len(prefixes)} error(s) into {args.out}:")
    for p in prefixes:
        print(f"  {format_prefix(p, table.width)}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    algorithms = [a.strip() for a in args.algorithm.split(",") if a.strip()]
    unknown = set(algorithms) - set(bench_mod.ALGORITHMS)
    if unknown:
        return _fail(f"unknown algorithm(s): {', '.join(sorted(unknown))}")

    if args.paths:
        if len(args.paths) < 2:
            return _fail("bench needs at least two table files (or --entries)")
        tables = load_tables(args.paths, args.width)
    elif args.entries:
        width = args.width or 32
        # cluster long prefixes under allocation-style blocks, like real
        # tables; uniformly random values make the baselines' binary trees
        # pathologically large at realistic entry counts
        base = gen_random_table(
            width,
            args.entries,
            args.hops,
            args.seed,
            block_bits=max(1, width // 2),
            block_count=max(64, args.entries // 32),
            name="gen-a",
        )
        if args.errors:
            other, _ = mutate(base, args.errors, args.seed + 1)
        else:
            other = base
        tables = [base, other]
    else:
        return _fail("bench needs table files or --entries to generate them")

    if len(tables) > 2 and set(algorithms) - {"veritable"}:
        print(
            f"note: baselines on {len(tables)} tables run "
            f"{len(tables) * (len(tables) - 1)} pairwise comparisons",
            file=sys.stderr,
        )
    rows = bench_mod.run_bench(tables, algorithms, args.repeats)
    if args.out_dir:
        written = bench_mod.write_outputs(rows, Path(args.out_dir))
        print("wrote " + ", ".join(str(p) for p in written), file=sys.stderr)
    if args.output == "json":
        print(to_json(rows, include_rss=False))
    else:
        for row in rows:
            m = row["metrics"]
            print(
                f"{row['algorithm']:>13}: {row['verdict']:<15} "
                f"build {m['build_ms']:9.3f} ms  verify {m['verify_ms']:9.3f} ms  "
                f"accesses {m['node_accesses']:>9}  comparisons {m['comparisons']:>9}  "
                f"acc/cmp {m['accesses_per_comparison']:6.3f}  "
                f"est mem {m['est_memory_bytes']:>11} B"
            )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        return _fail(str(exc))
    except (TableConfigError, MalformedEntryError) as exc:
        return _fail(str(exc))
    except ValueError as exc:
        return _fail(str(exc))
    except OSError as exc:
        return _fail(str(exc))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
