from random import Random

from fibeq.model import FibEntry, Prefix
from fibeq.spacecheck import detect_leaks, merge_super
from fibeq.tablegen import gen_random_table

from conftest import A, table


class TestDetectLeaks:
    def test_constructed_leak(self):
        specific = table(8, ("", A), ("100", 9), name="specific")
        default_only = table(8, ("", A), name="default-only")
        report = detect_leaks([specific, default_only])
        assert len(report.leak_points) == 1
        point = report.leak_points[0]
        assert point.prefix == Prefix.from_bits("100")
        assert point.default_derived == (False, True)
        assert report.leaking_routes_per_table == (0, 1)

    def test_identical_tables_are_clean(self, fib1):
        report = detect_leaks([fib1, fib1])
        assert report.clean
        assert report.leaking_routes_per_table == (0, 0)

    def test_worked_example_mixed_coverage(self, fib1, fib2):
        report = detect_leaks([fib1, fib2])
        flagged = {p.prefix.bits: p.default_derived for p in report.leak_points}
        # regions each table covers only via its default while the other is specific
        assert flagged == {
            "000": (False, True),
            "01": (False, True),
            "001": (True, False),
            "1": (True, False),
            "100": (True, False),
        }
        # maximal subtrees: 100 is nested under the already-leaking node 1
        assert report.leaking_routes_per_table == (2, 2)

    def test_leak_points_confirmed_by_linear_scan(self, fib1, fib2):
        report = detect_leaks([fib1, fib2])
        tables = [fib1, fib2]
        for point in report.leak_points:
            lo, hi = point.prefix.address_range(8)
            found = False
            for value in range(lo, hi + 1):
                address = Prefix(value, 8)
                lengths = []
                for t in tables:
                    best = -1
                    for entry in t.entries:
                        if entry.prefix.is_prefix_of(address):
                            best = max(best, entry.prefix.length)
                    lengths.append(best)
                if min(lengths) == 0 and max(lengths) > 0:
                    found = True
                    break
            assert found, f"no default/specific split inside {point.prefix}"

    def test_adding_leaked_route_removes_subtree(self):
        specific = table(8, ("", A), ("100", 9), name="specific")
        default_only = table(8, ("", A), name="default-only")
        fixed = table(8, ("", A), ("100", 9), name="fixed")
        report = detect_leaks([specific, fixed])
        assert report.clean
        assert report.leaking_routes_per_table == (0, 0)

    def test_synthesized_default_counts_as_default(self):
        specific = table(8, ("", A), ("100", 9), name="specific")
        empty = table(8, name="empty")
        report = detect_leaks([specific, empty])
        assert report.synthesized_defaults == (False, True)
        assert any(p.prefix.bits == "100" for p in report.leak_points)

    def test_random_self_comparison_clean(self):
        rng = Random(33)
        for _ in range(25):
            t = gen_random_table(8, rng.randint(1, 40), rng.randint(1, 6),
                                 seed=rng.randrange(2**30))
            assert detect_leaks([t, t]).clean


class TestMergeSuper:
    def test_union_of_worked_example(self, fib1, fib2):
        merged = merge_super([fib1, fib2])
        assert len(merged.entries) == 8
        assert {en.prefix.bits for en in merged.entries} == {
            "", "000", "001", "01", "1", "100", "1011", "11"
        }

    def test_single_table_identity(self, fib1):
        merged = merge_super([fib1])
        assert {en.prefix for en in merged.entries} == {en.prefix for en in fib1.entries}

    def test_idempotent_union(self, fib1):
        merged = merge_super([fib1, fib1])
        assert {(en.prefix, en.nexthop) for en in merged.entries} == {
            (en.prefix, en.nexthop) for en in fib1.entries
        }

    def test_lowest_index_wins_on_conflict(self):
        t1 = table(8, ("01", 5), name="first")
        t2 = table(8, ("01", 7), name="second")
        merged = merge_super([t1, t2])
        assert merged.entries == [FibEntry(Prefix.from_bits("01"), 5)]
