"""fibeq: forwarding-table equivalence checking over a joint PATRICIA trie."""

from .model import (
    DEFAULT_PREFIX,
    FibEntry,
    FibTable,
    MalformedEntryError,
    MetricsContext,
    Prefix,
    TableConfigError,
    canonicalize_table,
)
from .trie import JointTrie, NodeKind, TrieNode, build_joint_pt, lpm_lookup, node_census
from .verify import DivergenceRecord, VerificationReport, verify
from .oracle import brute_force_verify, lpm_linear, sampled_verify
from .baselines import normalization_verify, taco_verify
from .spacecheck import LeakReport, detect_leaks, merge_super
from .tablegen import aggregate_equiv, gen_random_table, mutate
from .tableio import ParseError, parse_table, serialize_table

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_PREFIX",
    "DivergenceRecord",
    "FibEntry",
    "FibTable",
    "JointTrie",
    "LeakReport",
    "MalformedEntryError",
    "MetricsContext",
    "NodeKind",
    "ParseError",
    "Prefix",
    "TableConfigError",
    "TrieNode",
    "VerificationReport",
    "aggregate_equiv",
    "brute_force_verify",
    "build_joint_pt",
    "canonicalize_table",
    "detect_leaks",
    "gen_random_table",
    "lpm_linear",
    "lpm_lookup",
    "merge_super",
    "mutate",
    "node_census",
    "normalization_verify",
    "parse_table",
    "sampled_verify",
    "serialize_table",
    "taco_verify",
    "verify",
]
