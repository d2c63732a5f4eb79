"""Shared instances and cached exhaustive runs for the test suite."""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from pathlib import Path

from gandyfix.decide import check_cost_bound, decide_pred
from gandyfix.fixpoint import CandidatePool, PredicateState, iterate, oracle_extension
from gandyfix.instance import Instance, load

EXAMPLES = Path(__file__).resolve().parents[1] / "docs" / "examples"
INSTANCE_NAMES = ("evena", "forest", "unary")
MAX_ITERS = 64

_cache: dict = {}


def instance(name: str) -> Instance:
    key = ("instance", name)
    if key not in _cache:
        _cache[key] = load(EXAMPLES / f"{name}.inst")
    return _cache[key]


def base_words(inst: Instance, max_len: int) -> list[str]:
    """Every base atom of length <= max_len, the empty word included."""
    out = [""]
    for n in range(1, max_len + 1):
        out.extend("".join(c) for c in itertools.product(inst.alphabet.symbols, repeat=n))
    return out


def pool(name: str, L: int) -> CandidatePool:
    key = ("pool", name, L)
    if key not in _cache:
        _cache[key] = CandidatePool(instance(name).model, L)
    return _cache[key]


def run(name: str, L: int):
    """(state, report) of iterate at bound L."""
    key = ("run", name, L)
    if key not in _cache:
        inst = instance(name)
        _cache[key] = iterate(inst.families, inst.model, pool(name, L), MAX_ITERS)
    return _cache[key]


def oracle(name: str, L: int) -> PredicateState:
    key = ("oracle", name, L)
    if key not in _cache:
        inst = instance(name)
        _cache[key] = oracle_extension(inst.families, inst.model, L)
    return _cache[key]


@dataclass
class Sweep:
    """decide_pred on every well-formed word, compared against the oracle."""

    name: str
    L: int
    queries: int = 0
    disagreements: list[tuple[str, str, bool]] = field(default_factory=list)
    bound_failures: list[tuple[str, str, int]] = field(default_factory=list)
    worst_ratio: float = 0.0
    iterate_agrees: bool = True
    elapsed: float = 0.0


def sweep(name: str, L: int) -> Sweep:
    key = ("sweep", name, L)
    if key in _cache:
        return _cache[key]
    started = time.perf_counter()
    inst = instance(name)
    fs, model = inst.families, inst.model
    state, _ = run(name, L)
    truth = oracle(name, L)
    result = Sweep(name, L)
    result.iterate_agrees = state.same_extensions(truth)
    words = base_words(inst, L) + pool(name, L).words()
    for p in fs.enrichable:
        fam = fs.family(p)
        members = truth.extensions[p]
        base = model.base_extension(p)
        for w in words:
            verdict = decide_pred(fs, model, p, w)
            result.queries += 1
            expected = w in members or w in base
            if verdict.value != expected:
                result.disagreements.append((p, w, verdict.value))
            report = check_cost_bound(verdict, fam, w)
            if not report.relaxed_ok:
                result.bound_failures.append((p, w, verdict.units))
            result.worst_ratio = max(result.worst_ratio,
                                     float(verdict.units / report.relaxed_bound))
    result.elapsed = time.perf_counter() - started
    _cache[key] = result
    return result


def generated(name: str, L: int) -> list[tuple[str, str]]:
    """(predicate, element) for every element of the oracle fixed point."""
    truth = oracle(name, L)
    return [(p, w) for p in truth.preds for w in sorted(truth.extensions[p])]


# Acceptance outcomes, printed by the terminal-summary hook in conftest.
ACCEPTANCE: dict[int, tuple[bool, str]] = {}
