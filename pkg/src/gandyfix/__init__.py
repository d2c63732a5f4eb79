"""Polynomial fixed-point enrichment of base models by hereditarily finite lists."""
from __future__ import annotations

from .decide import Verdict, bench_exponent, check_cost_bound, decide_pred
from .fixpoint import CandidatePool, PredicateState, compare_states, gamma_step, iterate, oracle_extension, stage_of
from .genfam import FamilySet, GeneratingFamily, GeneratingRule, Selector, alpha, gamma_rule, validate
from .instance import Instance, load, loads
from .listcodec import Alphabet, ListValue, decode, encode, split
from .meter import CostMeter

__all__ = [
    "Alphabet", "CandidatePool", "CostMeter", "FamilySet", "GeneratingFamily", "GeneratingRule",
    "Instance", "ListValue", "PredicateState", "Selector", "Verdict", "alpha", "bench_exponent",
    "check_cost_bound", "compare_states", "decide_pred", "decode", "encode", "gamma_rule",
    "gamma_step", "iterate", "load", "loads", "oracle_extension", "split", "stage_of", "validate",
]
