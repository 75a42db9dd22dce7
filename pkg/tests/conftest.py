"""Shared fixtures: the 8-bit worked example and randomized pair corpora."""
from __future__ import annotations

from random import Random

import pytest

from fibeq.model import FibEntry, FibTable, Prefix
from fibeq.tablegen import aggregate_equiv, gen_random_table, mutate

# Next-hop labels for the worked example.
A, B, C = 1, 2, 3


def e(bits: str, hop: int) -> FibEntry:
    return FibEntry(Prefix.from_bits(bits), hop)


def table(width: int, *entries: tuple[str, int], name: str = "t") -> FibTable:
    return FibTable(width, [e(bits, hop) for bits, hop in entries], name=name)


@pytest.fixture
def fib1() -> FibTable:
    """Worked-example table 1 (8-bit space)."""
    return table(8, ("", A), ("000", B), ("01", B), ("11", A), ("1011", A), name="fib1")


@pytest.fixture
def fib2() -> FibTable:
    """Worked-example table 2; forwarding-equivalent to fib1."""
    return table(8, ("", B), ("001", A), ("1", A), ("100", A), name="fib2")


@pytest.fixture
def fib2_broken() -> FibTable:
    """fib2 with 001 rerouted: diverges from fib1 exactly on 001/3."""
    return table(8, ("", B), ("001", C), ("1", A), ("100", A), name="fib2-broken")


def make_pair_corpus(
    width: int, pairs: int, seed: int, size_lo: int, size_hi: int
) -> list[tuple[FibTable, FibTable]]:
    """Mixed corpus: equivalent pairs (aggregated or shuffled) and
    non-equivalent ones (mutated or independent), deterministic per seed."""
    rng = Random(seed)
    out = []
    for i in range(pairs):
        size = rng.randint(size_lo, size_hi)
        hops = rng.randint(2, 6)
        t1 = gen_random_table(width, size, hops, seed=rng.randrange(2**30))
        kind = i % 5
        if kind == 0:
            t2 = aggregate_equiv(t1)
        elif kind == 1:
            entries = list(t1.entries)
            rng.shuffle(entries)
            t2 = FibTable(width, entries, name=f"{t1.name}-shuffled")
        elif kind in (2, 3):
            try:
                t2, _ = mutate(t1, rng.randint(1, 2), seed=rng.randrange(2**30))
            except ValueError:  # tiny table saturated; fall back to independent
                t2 = gen_random_table(width, size, hops, seed=rng.randrange(2**30))
        else:
            t2 = gen_random_table(width, size, hops, seed=rng.randrange(2**30))
        out.append((t1, t2))
    return out


@pytest.fixture(scope="session")
def corpus_w8() -> list[tuple[FibTable, FibTable]]:
    return make_pair_corpus(width=8, pairs=1000, seed=101, size_lo=1, size_hi=60)


@pytest.fixture(scope="session")
def corpus_w16() -> list[tuple[FibTable, FibTable]]:
    return make_pair_corpus(width=16, pairs=200, seed=202, size_lo=10, size_hi=500)
