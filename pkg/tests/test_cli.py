import csv
import json
from pathlib import Path

import pytest
from jsonschema import validate

from fibeq.cli import main
from fibeq.tableio import write_table

from conftest import table

SCHEMA = json.loads(
    (Path(__file__).resolve().parent.parent / "docs" / "report.schema.json").read_text()
)


@pytest.fixture
def example_files(tmp_path, fib1, fib2, fib2_broken):
    paths = {}
    for t in (fib1, fib2, fib2_broken):
        p = tmp_path / f"{t.name}.txt"
        write_table(t, p)
        paths[t.name] = str(p)
    return paths


class TestVerifyCommand:
    def test_equivalent_pair_exits_zero(self, example_files, capsys):
        code = main(["verify", example_files["fib1"], example_files["fib2"], "--width", "8"])
        assert code == 0
        assert "EQUIVALENT" in capsys.readouterr().out

    def test_divergent_pair_exits_one(self, example_files, capsys):
        code = main(
            ["verify", example_files["fib1"], example_files["fib2-broken"], "--width", "8"]
        )
        assert code == 1
        out = capsys.readouterr().out
        assert "NOT EQUIVALENT" in out and "001/3" in out

    def test_single_path_is_usage_error(self, example_files):
        assert main(["verify", example_files["fib1"], "--width", "8"]) == 2

    def test_parse_error_exits_two(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("10.0.0.0/40 1\n")
        assert main(["verify", str(bad), str(bad), "--width", "32"]) == 2

    def test_json_output_matches_schema(self, example_files, capsys):
        for pair, expected in (
            (("fib1", "fib2"), 0),
            (("fib1", "fib2-broken"), 1),
        ):
            code = main(
                ["verify", example_files[pair[0]], example_files[pair[1]],
                 "--width", "8", "--output", "json"]
            )
            assert code == expected
            doc = json.loads(capsys.readouterr().out)
            validate(doc, SCHEMA)
            assert doc["algorithm"] == "veritable"

    def test_baseline_algorithms(self, example_files, capsys):
        for algorithm in ("taco", "normalization"):
            code = main(
                ["verify", example_files["fib1"], example_files["fib2"],
                 "--width", "8", "--algorithm", algorithm, "--output", "json"]
            )
            assert code == 0
            doc = json.loads(capsys.readouterr().out)
            validate(doc, SCHEMA)
            assert doc["algorithm"] == algorithm

    def test_baseline_rejects_three_tables(self, example_files, capsys):
        code = main(
            ["verify", example_files["fib1"], example_files["fib2"],
             example_files["fib2-broken"], "--width", "8", "--algorithm", "taco"]
        )
        assert code == 2
        assert "exactly two" in capsys.readouterr().err

    def test_multi_table_veritable(self, example_files):
        code = main(
            ["verify", example_files["fib1"], example_files["fib2"],
             example_files["fib2-broken"], "--width", "8"]
        )
        assert code == 1

    def test_rss_flag_adds_labeled_metric(self, example_files, capsys):
        code = main(
            ["verify", example_files["fib1"], example_files["fib2"],
             "--width", "8", "--output", "json", "--rss"]
        )
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        validate(doc, SCHEMA)
        assert doc["metrics"]["process_peak_rss_bytes"] > 0

    def test_ipv6_width_tables_end_to_end(self, tmp_path, capsys):
        from fibeq.tablegen import gen_random_table, mutate

        base = gen_random_table(128, 300, 20, seed=77, name="v6")
        broken, _ = mutate(base, 2, seed=78)
        p1, p2 = tmp_path / "v6a.txt", tmp_path / "v6b.txt"
        write_table(base, p1)
        write_table(broken, p2)
        assert "::" in p1.read_text() or ":" in p1.read_text()
        assert main(["verify", str(p1), str(p1)]) == 0  # width inferred from notation
        capsys.readouterr()
        code = main(["verify", str(p1), str(p2), "--output", "json"])
        assert code == 1
        doc = json.loads(capsys.readouterr().out)
        assert doc["width"] == 128
        assert len(doc["divergences"]) >= 2


class TestBlackholesCommand:
    def test_identical_pair_clean(self, example_files):
        assert main(["blackholes", example_files["fib1"], example_files["fib1"],
                     "--width", "8"]) == 0

    def test_constructed_leak(self, tmp_path, capsys):
        t1 = table(8, ("", 1), ("100", 9), name="t1")
        t2 = table(8, ("", 1), name="t2")
        p1, p2 = tmp_path / "t1.txt", tmp_path / "t2.txt"
        write_table(t1, p1)
        write_table(t2, p2)
        code = main(["blackholes", str(p1), str(p2), "--width", "8", "--output", "json"])
        assert code == 1
        doc = json.loads(capsys.readouterr().out)
        assert doc["leak_points"][0]["prefix"] == "100/3"
        assert doc["leaking_routes_per_table"] == [0, 1]

    def test_parse_failure(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("junk\n")
        assert main(["blackholes", str(bad), str(bad), "--width", "8"]) == 2


class TestGenerateAggregateMutate:
    def test_gen_deterministic_files(self, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        args = ["--width", "16", "--entries", "40", "--hops", "5", "--seed", "9"]
        assert main(["gen", str(a)] + args) == 0
        assert main(["gen", str(b)] + args) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_aggregate_then_verify_equivalent(self, tmp_path):
        src, agg = tmp_path / "src.txt", tmp_path / "agg.txt"
        assert main(["gen", str(src), "--width", "16", "--entries", "60", "--seed", "3"]) == 0
        assert main(["aggregate", str(src), str(agg), "--width", "16"]) == 0
        assert main(["verify", str(src), str(agg), "--width", "16"]) == 0

    def test_mutate_then_verify_divergent(self, tmp_path, capsys):
        src, bad = tmp_path / "src.txt", tmp_path / "bad.txt"
        assert main(["gen", str(src), "--width", "16", "--entries", "80", "--seed", "5"]) == 0
        assert main(["mutate", str(src), str(bad), "--width", "16",
                     "--errors", "3", "--seed", "6"]) == 0
        capsys.readouterr()
        code = main(["verify", str(src), str(bad), "--width", "16", "--output", "json"])
        assert code == 1
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["divergences"]) >= 3


class TestBenchCommand:
    def test_bench_writes_csv_and_figures(self, example_files, tmp_path, capsys):
        out_dir = tmp_path / "bench-out"
        code = main(
            ["bench", example_files["fib1"], example_files["fib2"], "--width", "8",
             "--repeats", "2", "--out-dir", str(out_dir), "--output", "json"]
        )
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert [row["algorithm"] for row in doc] == ["veritable", "taco", "normalization"]
        accesses = {
            row["algorithm"]: row["metrics"]["accesses_per_comparison"] for row in doc
        }
        assert accesses["veritable"] < min(accesses["taco"], accesses["normalization"])

        with open(out_dir / "bench.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["algorithm"] for r in rows] == ["veritable", "taco", "normalization"]
        for name in ("build_ms", "verify_ms", "accesses_per_comparison", "est_memory_bytes"):
            png = out_dir / f"{name}.png"
            assert png.exists() and png.stat().st_size > 0

    def test_bench_generated_mode(self, capsys):
        code = main(
            ["bench", "--entries", "200", "--errors", "2", "--seed", "4",
             "--width", "16", "--algorithm", "veritable", "--output", "json"]
        )
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc[0]["verdict"] == "not-equivalent"

    def test_bench_counters_stable_across_repeats(self, example_files, capsys):
        docs = []
        for repeats in ("1", "5"):
            code = main(
                ["bench", example_files["fib1"], example_files["fib2"], "--width", "8",
                 "--repeats", repeats, "--output", "json"]
            )
            assert code == 0
            docs.append(json.loads(capsys.readouterr().out))
        for a, b in zip(*docs):
            assert a["metrics"]["node_accesses"] == b["metrics"]["node_accesses"]
            assert a["metrics"]["comparisons"] == b["metrics"]["comparisons"]

    def test_bench_three_tables_runs_baselines_pairwise(self, example_files, capsys):
        code = main(
            ["bench", example_files["fib1"], example_files["fib2"],
             example_files["fib2-broken"], "--width", "8", "--output", "json"]
        )
        assert code == 0
        out = capsys.readouterr().out
        doc = json.loads(out[out.index("[") :])
        by_name = {row["algorithm"]: row for row in doc}
        assert by_name["taco"]["pairwise_runs"] == 6  # ordered pairs of 3 tables
        assert by_name["taco"]["verdict"] == "not-equivalent"
        assert by_name["veritable"]["verdict"] == "not-equivalent"
        assert "pairwise_runs" not in by_name["veritable"]

    def test_bench_without_inputs_is_usage_error(self):
        assert main(["bench"]) == 2

    def test_unknown_algorithm_rejected(self, example_files):
        assert main(["bench", example_files["fib1"], example_files["fib2"],
                     "--width", "8", "--algorithm", "bogus"]) == 2
