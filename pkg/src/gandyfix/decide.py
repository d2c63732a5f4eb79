"""Direct polynomial decision of enriched predicates on arbitrary words.

To decide ``P(l)`` for ``l = <l1,...,lk>``: dispatch to the one rule that
could have generated ``l``, decide recursively the (at most one per
component) enrichable atoms the rule applies to its variables, substitute
those truth values, and evaluate the residual base formula on the
components.  Base words answer from the declared base extension.
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import CostBoundViolation, InsufficientSizes
from .formulas import And, Atom, Formula, Implies, Not, Or, Quant, Truth, Var
from .genfam import FamilySet, GeneratingFamily
from .listcodec import left_count, split
from .meter import CostMeter
from .semantics import BaseModel, EnrichedModel, eval_formula

__all__ = [
    "CostMeter", "Derivation", "Verdict", "CostReport", "BenchResult", "decide_pred",
    "check_cost_bound", "bench_exponent", "chain_generator", "replay", "enriched_model",
    "substitute",
]


@dataclass(frozen=True)
class Derivation:
    """Which rule decided ``pred(word)`` and the sub-derivations it consumed."""

    pred: str
    word: str
    rule: str | None
    value: bool
    children: tuple[Derivation, ...] = ()

    def lines(self, indent: int = 0) -> list[str]:
        head = (f"{'  ' * indent}{self.pred}({self.word}) = {str(self.value).lower()}"
                f" by {self.rule or 'base'}")
        out = [head]
        for child in self.children:
            out.extend(child.lines(indent + 1))
        return out


@dataclass
class Verdict:
    value: bool
    meter: CostMeter
    trace: Derivation | None = None

    @property
    def units(self) -> int:
        return self.meter.units


def substitute(f: Formula, values: dict[tuple[str, int], bool], meter: CostMeter) -> Formula:
    """Replace each decided atom ``P(xj)`` by its truth value."""
    meter.subst += 1
    kind = type(f)
    if kind is Atom:
        if len(f.args) == 1 and type(f.args[0]) is Var:
            key = (f.pred, f.args[0].index)
            if key in values:
                return Truth(values[key])
        return f
    if kind is And:
        return And(tuple(substitute(p, values, meter) for p in f.parts))
    if kind is Or:
        return Or(tuple(substitute(p, values, meter) for p in f.parts))
    if kind is Not:
        return Not(substitute(f.body, values, meter))
    if kind is Implies:
        return Implies(substitute(f.premise, values, meter), substitute(f.conclusion, values, meter))
    if kind is Quant:
        return Quant(f.kind, f.var, substitute(f.body, values, meter), f.pool)
    return f


class _Decider:
    def __init__(self, fs: FamilySet, model: BaseModel, memo: bool, trace: bool):
        self.fs = fs
        self.model = model
        self.base = EnrichedModel(model)
        self.cache: dict | None = {} if memo else None
        self.trace = trace
        self.meter = CostMeter()

    def run(self, pred: str, word: str, parent_left: int | None = None):
        left = left_count(word)
        if parent_left is not None and left >= parent_left:
            raise AssertionError(
                f"recursive call on {word!r} does not shrink leftCount ({left} >= {parent_left})")
        key = (pred, word)
        if self.cache is not None and key in self.cache:
            value, delta, node = self.cache[key]
            self.meter.add(delta)
            return value, node
        meter = self.meter
        snap = meter.snapshot()
        rule_id = None
        children: list[Derivation] = []
        if self.model.in_universe(word, meter):
            meter.base += 1
            value = word in self.model.base_extension(pred)
        else:
            comps = split(word, meter)
            rule = None if comps is None else self.fs.match(pred, comps, meter)
            if rule is None:
                value = False
            else:
                rule_id = rule.id
                decided: dict[tuple[str, int], bool] = {}
                used_vars: set[int] = set()
                for p, j in self.fs.calls(rule):
                    if j in used_vars:
                        raise AssertionError(
                            f"rule {rule.id} issues two recursive calls on x{j}")
                    used_vars.add(j)
                    if j > len(comps):
                        continue
                    decided[(p, j)], child = self.run(p, comps[j - 1], left)
                    if child is not None:
                        children.append(child)
                residual = substitute(rule.formula, decided, meter)
                before = meter.units
                value = eval_formula(self.base, residual, dict(enumerate(comps, 1)), meter)
                fam = self.fs.family(pred)
                spent = meter.units - before
                size = sum(len(c) for c in comps)
                if fam.bound is not None and spent > fam.bound.limit(size):
                    raise CostBoundViolation(
                        f"residual of {pred}.{rule.id} used {spent} units on {comps!r}; declared "
                        f"{fam.bound} allows {fam.bound.limit(size)}")
        node = Derivation(pred, word, rule_id, value, tuple(children)) if self.trace else None
        if self.cache is not None:
            self.cache[key] = (value, meter.since(snap), node)
        return value, node


def decide_pred(fs: FamilySet, model: BaseModel, pred: str, word: str, *,
                memo: bool = True, trace: bool = False) -> Verdict:
    """Decide ``pred(word)`` for any word; malformed or ungenerated words are false.

    With ``memo`` the work is cached per query, but cache hits replay their
    original charges, so the meter always reflects the un-memoized procedure.
    """
    fs.family(pred)
    decider = _Decider(fs, model, memo, trace)
    value, node = decider.run(pred, word)
    return Verdict(value, decider.meter, node)


def enriched_model(fs: FamilySet, model: BaseModel) -> EnrichedModel:
    """The base model enriched by every family, answered through decide_pred."""
    def layer(pred: str):
        def holds(word: str, meter: CostMeter) -> bool:
            verdict = decide_pred(fs, model, pred, word)
            meter.add(verdict.meter.snapshot())
            return verdict.value
        return holds
    return EnrichedModel(model, tuple((p, layer(p)) for p in fs.enrichable))


def replay(node: Derivation, fs: FamilySet, model: BaseModel) -> bool:
    """Recompute a derivation bottom-up with plain formula evaluation."""
    if node.rule is None:
        if model.in_universe(node.word):
            return node.word in model.base_extension(node.pred)
        return False
    rule = fs._rules[(node.pred, node.rule)]
    known = {(c.pred, c.word): replay(c, fs, model) for c in node.children}

    def lookup(pred: str):
        return lambda word, _m: known.get((pred, word), False)

    m = EnrichedModel(model, tuple((p, lookup(p)) for p in fs.enrichable))
    comps = split(node.word)
    return eval_formula(m, rule.formula, dict(enumerate(comps, 1)))


# -- cost audit ----------------------------------------------------------------

@dataclass(frozen=True)
class CostReport:
    n: int
    length: int
    units: int
    C: Fraction
    p: int
    tight_bound: Fraction
    relaxed_bound: Fraction

    @property
    def tight_ok(self) -> bool:
        return self.units <= self.tight_bound

    @property
    def relaxed_ok(self) -> bool:
        return self.units < self.relaxed_bound

    def record(self) -> str:
        return (f"n={self.n} len={self.length} units={self.units} "
                f"tight={float(self.tight_bound):g} tight_ok={str(self.tight_ok).lower()} "
                f"relaxed={float(self.relaxed_bound):g} "
                f"relaxed_ok={str(self.relaxed_ok).lower()}")


def check_cost_bound(verdict: Verdict, family: GeneratingFamily, word: str) -> CostReport:
    """Compare metered units with C*(4n-2)*|w|^p and the relaxed 4C*|w|^(p+1)."""
    if family.bound is None:
        raise ValueError(f"family {family.target!r} has no declared bound")
    C, p = family.bound.C, family.bound.p
    n = left_count(word)
    size = max(1, len(word))
    tight = C * (4 * n - 2) * size ** p if n >= 1 else C * size ** p
    return CostReport(n, len(word), verdict.units, C, p, tight, 4 * C * size ** (p + 1))


def chain_generator(seed: str, wrap: str, hole: str = "#") -> Callable[[int], str]:
    """Nested inputs: wrap ``seed`` repeatedly until the encoding reaches ``size``."""
    if wrap.count(hole) != 1:
        raise ValueError(f"wrap template needs exactly one {hole!r}: {wrap!r}")
    if len(wrap) <= 1:
        raise ValueError("wrap template must grow the word")

    def generate(size: int) -> str:
        word = seed
        while len(word) < size:
            word = wrap.replace(hole, word)
        return word
    return generate


@dataclass
class BenchResult:
    slope: float
    rows: list[tuple[int, int, int, CostReport]] = field(default_factory=list)


def bench_exponent(fs: FamilySet, model: BaseModel, pred: str, sizes: Sequence[int],
                   generator: Callable[[int], str]) -> BenchResult:
    """Least-squares slope of log(units) against log(|w|) over generated inputs."""
    fam = fs.family(pred)
    rows = []
    for size in sizes:
        word = generator(size)
        verdict = decide_pred(fs, model, pred, word)
        rows.append((size, len(word), verdict.units, check_cost_bound(verdict, fam, word)))
    lengths = {length for _, length, _, _ in rows}
    if len(lengths) < 4:
        raise InsufficientSizes(f"need at least 4 distinct input lengths, got {sorted(lengths)}")
    xs = [math.log(length) for _, length, _, _ in rows]
    ys = [math.log(units) for _, _, units, _ in rows]
    slope, _ = statistics.linear_regression(xs, ys)
    return BenchResult(slope, rows)
