"""Generating rules and families, structural dispatch, and static validation.

A rule admits ``<a1,...,ak>`` into its target predicate when its formula is
true on ``(a1,...,ak)``.  Which rule is responsible for a candidate is decided
by its selector alone (component count plus an optional required first
component), so the dispatch is a cheap syntactic function and disjointness
of rules reduces to disjointness of selectors.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import UnknownRule
from .formulas import (
    App, Atom, Diagnostic, Formula, Var, atoms, check_generator_eligible, check_positive,
    free_vars, terms_of,
)
from .listcodec import RESERVED, Alphabet, split
from .meter import CostMeter
from .semantics import Bound, Signature

# alpha() charges at most ALPHA_CONSTANT * |w| * ceil(log2(|w| + 1)) units.
ALPHA_CONSTANT = 6


@dataclass(frozen=True)
class Selector:
    arity: int
    head: str | None = None

    def __post_init__(self) -> None:
        if self.arity < 1:
            raise ValueError(f"selector arity must be >= 1, got {self.arity}")
        if self.head is not None and (not self.head or any(c in RESERVED for c in self.head)):
            raise ValueError(f"head tag must be a non-empty base word, got {self.head!r}")

    def matches(self, comps: Sequence[str]) -> bool:
        return len(comps) == self.arity and (self.head is None or comps[0] == self.head)

    def overlaps(self, other: Selector) -> bool:
        if self.arity != other.arity:
            return False
        return self.head is None or other.head is None or self.head == other.head

    def __str__(self) -> str:
        return f"arity={self.arity}" + (f" head='{self.head}'" if self.head is not None else "")


@dataclass(frozen=True)
class GeneratingRule:
    id: str
    selector: Selector
    formula: Formula
    target: str
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class GeneratingFamily:
    target: str
    rules: tuple[GeneratingRule, ...]
    bound: Bound | None = None
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)


def enrichable_calls(formula: Formula, enrichable: Iterable[str]) -> tuple[tuple[str, int], ...]:
    """Distinct ``(predicate, variable)`` pairs for enrichable atoms ``P(xj)``."""
    names = set(enrichable)
    seen = []
    for _, atom in atoms(formula):
        if atom.pred in names and len(atom.args) == 1 and isinstance(atom.args[0], Var):
            key = (atom.pred, atom.args[0].index)
            if key not in seen:
                seen.append(key)
    return tuple(sorted(seen, key=lambda k: (k[1], k[0])))


class FamilySet:
    """The ordered families F_{P1}, ..., F_{PN}; immutable once built."""

    def __init__(self, families: Iterable[GeneratingFamily], signature: Signature,
                 alphabet: Alphabet | None = None):
        self.families = tuple(families)
        self.signature = signature
        self.alphabet = alphabet
        self._family = {}
        self._rules: dict[tuple[str, str], GeneratingRule] = {}
        self._dispatch: dict[str, dict[tuple[int, str | None], GeneratingRule]] = {}
        self._calls: dict[GeneratingRule, tuple[tuple[str, int], ...]] = {}
        names = self.enrichable
        for fam in self.families:
            self._family.setdefault(fam.target, fam)
            table = self._dispatch.setdefault(fam.target, {})
            for rule in fam.rules:
                self._rules.setdefault((fam.target, rule.id), rule)
                table.setdefault((rule.selector.arity, rule.selector.head), rule)
                self._calls[rule] = enrichable_calls(rule.formula, names)

    @property
    def enrichable(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(f.target for f in self.families))

    def family(self, pred: str) -> GeneratingFamily:
        try:
            return self._family[pred]
        except KeyError:
            raise UnknownRule(f"no generating family for {pred!r}") from None

    def rules(self) -> Iterable[GeneratingRule]:
        for fam in self.families:
            yield from fam.rules

    def calls(self, rule: GeneratingRule) -> tuple[tuple[str, int], ...]:
        return self._calls[rule]

    def match(self, pred: str, comps: Sequence[str], meter: CostMeter | None = None) -> GeneratingRule | None:
        """The rule of ``pred``'s family whose selector accepts these components."""
        table = self._dispatch.get(pred)
        if meter is not None:
            meter.dispatch += 2 + len(comps[0])
        if not table:
            return None
        k = len(comps)
        rule = table.get((k, comps[0]))
        if rule is None:
            rule = table.get((k, None))
        return rule

    def __repr__(self) -> str:
        inner = ", ".join(f"{f.target}:{len(f.rules)}" for f in self.families)
        return f"FamilySet({inner})"


def alpha(fs: FamilySet, pred: str, word: str, meter: CostMeter | None = None) -> str | None:
    """Id of the unique rule responsible for ``word``, or None."""
    comps = split(word, meter)
    if comps is None:
        return None
    rule = fs.match(pred, comps, meter)
    return None if rule is None else rule.id


def gamma_rule(fs: FamilySet, pred: str, rule_id: str, meter: CostMeter | None = None) -> GeneratingRule:
    if meter is not None:
        meter.dispatch += 1
    try:
        return fs._rules[(pred, rule_id)]
    except KeyError:
        raise UnknownRule(f"family {pred!r} has no rule {rule_id!r}") from None


# -- validation --------------------------------------------------------------

def _diag(code: str, message: str, rule: GeneratingRule | None = None, path=(),
          fam: GeneratingFamily | None = None) -> Diagnostic:
    where = rule if rule is not None else fam
    return Diagnostic(code, message, rule.id if rule is not None else None,
                      getattr(where, "line", None), getattr(where, "col", None), tuple(path))


def validate(fs: FamilySet) -> list[Diagnostic]:
    """Every static violation in the family set; empty means valid."""
    sig = fs.signature
    enrichable = set(fs.enrichable)
    out: list[Diagnostic] = []

    seen_targets = set()
    for fam in fs.families:
        if fam.target in seen_targets:
            out.append(_diag("duplicate-family", f"second family for {fam.target!r}", fam=fam))
        seen_targets.add(fam.target)
        if not sig.is_enrichable(fam.target):
            out.append(_diag("target", f"{fam.target!r} is not a unary enrichable predicate",
                             fam=fam))
        if fam.bound is None:
            out.append(_diag("bound", f"family {fam.target!r} declares no (C, p) bound", fam=fam))

    ids: dict[str, GeneratingRule] = {}
    for fam in fs.families:
        for rule in fam.rules:
            if rule.id in ids:
                out.append(_diag("duplicate-rule", f"rule id {rule.id!r} used more than once", rule))
            ids.setdefault(rule.id, rule)
            if rule.target != fam.target:
                out.append(_diag("target", f"rule targets {rule.target!r} inside family "
                                           f"{fam.target!r}", rule))
            out.extend(_check_rule(rule, sig, enrichable, fs.alphabet))

    all_rules = [(fam.target, r) for fam in fs.families for r in fam.rules]
    for (p1, r1), (p2, r2) in itertools.combinations(all_rules, 2):
        if r1.selector.overlaps(r2.selector):
            out.append(_diag("disjointness",
                             f"selector {r1.selector} of {p1}.{r1.id} overlaps {r2.selector} "
                             f"of {p2}.{r2.id}", r2))
    return out


def _check_rule(rule: GeneratingRule, sig: Signature, enrichable: set[str],
                alphabet: Alphabet | None) -> list[Diagnostic]:
    out = []
    f = rule.formula
    for d in check_generator_eligible(f):
        out.append(_diag(d.code, d.message, rule, d.path))
    for pred in sorted(enrichable):
        if not check_positive(f, pred):
            out.append(_diag("positivity", f"enrichable predicate {pred!r} occurs negated", rule))

    extra = sorted(v for v in free_vars(f) if not 1 <= v <= rule.selector.arity)
    if extra:
        names = ", ".join(f"x{v}" for v in extra)
        out.append(_diag("free-variable", f"{names} outside x1..x{rule.selector.arity}", rule))

    per_var: dict[int, set[str]] = defaultdict(set)
    for path, atom in atoms(f):
        if atom.pred in enrichable:
            if len(atom.args) != 1 or not isinstance(atom.args[0], Var):
                out.append(_diag("enrichable-argument",
                                 f"{atom.pred} must be applied to a single variable", rule, path))
                continue
            per_var[atom.args[0].index].add(atom.pred)
        elif atom.pred not in sig.predicates:
            out.append(_diag("unknown-symbol", f"unknown predicate {atom.pred!r}", rule, path))
        elif sig.predicates[atom.pred] != len(atom.args):
            out.append(_diag("arity", f"{atom.pred} expects {sig.predicates[atom.pred]} "
                                      f"argument(s), got {len(atom.args)}", rule, path))
    for var, preds in sorted(per_var.items()):
        if len(preds) > 1:
            out.append(_diag("separability", f"x{var} carries distinct enrichable predicates "
                                             f"{', '.join(sorted(preds))}", rule))

    for term in terms_of(f):
        if isinstance(term, App):
            if term.fn not in sig.functions:
                out.append(_diag("unknown-symbol", f"unknown function {term.fn!r}", rule))
            elif sig.functions[term.fn] != len(term.args):
                out.append(_diag("arity", f"{term.fn} expects {sig.functions[term.fn]} "
                                          f"argument(s), got {len(term.args)}", rule))
        elif alphabet is not None and hasattr(term, "word") and not alphabet.is_word(term.word):
            out.append(_diag("constant", f"constant '{term.word}' is not a word over the alphabet",
                             rule))
    return out
