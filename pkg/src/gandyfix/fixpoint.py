"""Bottom-up iteration of the generating operator on a finite candidate pool.

One application of the operator runs the families in order; family j sees
the extensions produced by families 1..j-1 in the same application and the
previous stage for itself and everything after it.  Materialization is
restricted to encodings of length <= L, which keeps every stage finite.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping

from .errors import CostBoundViolation, DisjointnessViolation, PoolTooLarge
from .formulas import And, Eq, Lit, Var
from .genfam import FamilySet, GeneratingFamily, GeneratingRule
from .meter import CostMeter
from .semantics import BaseModel, EnrichedModel, eval_formula

DEFAULT_BUDGET = 2_000_000


class Order(enum.Enum):
    LESS_OR_EQUAL = "less-or-equal"
    INCOMPARABLE = "incomparable"  # i.e. not <=; the order is only partial


@dataclass(frozen=True, eq=False)
class PredicateState:
    """Extensions Q_1..Q_N with the stage at which each element entered."""

    preds: tuple[str, ...]
    extensions: Mapping[str, Mapping[str, int]]
    stage: int = 0

    @classmethod
    def empty(cls, preds: Iterable[str]) -> PredicateState:
        preds = tuple(preds)
        return cls(preds, {p: {} for p in preds}, 0)

    def members(self, pred: str) -> frozenset[str]:
        return frozenset(self.extensions[pred])

    def sizes(self) -> dict[str, int]:
        return {p: len(self.extensions[p]) for p in self.preds}

    def same_extensions(self, other: PredicateState) -> bool:
        return self.preds == other.preds and all(
            self.extensions[p].keys() == other.extensions[p].keys() for p in self.preds)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PredicateState):
            return NotImplemented
        return (self.preds == other.preds and self.stage == other.stage
                and all(dict(self.extensions[p]) == dict(other.extensions[p]) for p in self.preds))

    def __repr__(self) -> str:
        sizes = ", ".join(f"{p}:{n}" for p, n in self.sizes().items())
        return f"PredicateState(stage={self.stage}, {sizes})"


def compare_states(s: PredicateState, t: PredicateState) -> Order:
    if s.preds != t.preds:
        raise ValueError(f"states over different predicates: {s.preds} vs {t.preds}")
    for p in s.preds:
        if not s.extensions[p].keys() <= t.extensions[p].keys():
            return Order.INCOMPARABLE
    return Order.LESS_OR_EQUAL


def stage_of(s: PredicateState, word: str) -> int | None:
    stages = [s.extensions[p][word] for p in s.preds if word in s.extensions[p]]
    return min(stages) if stages else None


# -- candidate pool -------------------------------------------------------------

def _base_atoms(model: BaseModel, max_len: int) -> list[list[str]]:
    by_len: list[list[str]] = [[] for _ in range(max_len + 1)]
    for n in range(1, max_len + 1):
        for chars in itertools.product(model.alphabet.symbols, repeat=n):
            w = "".join(chars)
            if model.in_universe(w):
                by_len[n].append(w)
    return by_len


def pool_size(model: BaseModel, max_len: int) -> int:
    """Number of list encodings of length <= max_len, without building them."""
    atoms = [0] * (max_len + 1)
    atom_lists = _base_atoms(model, max(0, max_len - 2))
    for n, group in enumerate(atom_lists):
        atoms[n] = len(group)
    elems = [0] * (max_len + 1)
    seqs = [0] * (max_len + 1)
    for n in range(1, max_len + 1):
        lists = seqs[n - 2] if n >= 3 else 0
        elems[n] = atoms[n] + lists
        seqs[n] = elems[n] + sum(elems[k] * seqs[n - k - 1] for k in range(1, n - 1))
    return sum(seqs[n - 2] for n in range(3, max_len + 1))


class CandidatePool:
    """Every list encoding of length <= ``max_len`` over base-universe leaves.

    Components range over the list closure of the base universe; the empty
    word is a base element but never a component.
    """

    def __init__(self, model: BaseModel, max_len: int, budget: int = DEFAULT_BUDGET):
        if max_len < 1:
            raise ValueError("max_len must be positive")
        size = pool_size(model, max_len)
        if size > budget:
            raise PoolTooLarge(f"{size} candidates at L={max_len} exceed budget {budget}")
        self.max_len = max_len
        atoms = _base_atoms(model, max(0, max_len - 2))
        elems: list[list[str]] = [[] for _ in range(max_len + 1)]
        seqs: list[list[tuple[str, ...]]] = [[] for _ in range(max_len + 1)]
        by_arity: dict[int, list[tuple[str, tuple[str, ...]]]] = {}
        for n in range(1, max_len + 1):
            if n >= 3:
                for comps in seqs[n - 2]:
                    word = "<" + ",".join(comps) + ">"
                    elems[n].append(word)
                    by_arity.setdefault(len(comps), []).append((word, comps))
            if n < len(atoms):
                elems[n].extend(atoms[n])
            if n <= max_len - 2:
                seq = [(e,) for e in elems[n]]
                for k in range(1, n - 1):
                    for e in elems[k]:
                        seq.extend((e,) + rest for rest in seqs[n - k - 1])
                seqs[n] = seq
        self.base_atoms = [w for group in atoms for w in group]
        self._by_arity = {k: sorted(v) for k, v in by_arity.items()}
        self.size = sum(len(v) for v in by_arity.values())

    def with_arity(self, k: int) -> list[tuple[str, tuple[str, ...]]]:
        return self._by_arity.get(k, [])

    def arities(self) -> list[int]:
        return sorted(self._by_arity)

    def candidates(self) -> Iterator[tuple[str, tuple[str, ...]]]:
        for k in self.arities():
            yield from self._by_arity[k]

    def words(self) -> list[str]:
        return sorted(w for w, _ in self.candidates())

    def __len__(self) -> int:
        return self.size


# -- the operator -------------------------------------------------------------

@dataclass(frozen=True)
class Admission:
    stage: int
    pred: str
    rule: str
    word: str
    units: int

    def record(self) -> str:
        return (f"stage={self.stage} pred={self.pred} rule={self.rule} "
                f"elem={self.word} units={self.units}")


TraceSink = Callable[[Admission], None]


def _state_model(model: BaseModel, ext: Mapping[str, Mapping[str, int]]) -> EnrichedModel:
    return EnrichedModel(model, tuple((p, (lambda w, _m, S=ext[p]: w in S)) for p in ext))


def _audit_bound(fam: GeneratingFamily, rule: GeneratingRule, comps, units: int) -> None:
    if fam.bound is None:
        return
    size = sum(len(c) for c in comps)
    if units > fam.bound.limit(size):
        raise CostBoundViolation(
            f"rule {fam.target}.{rule.id} used {units} units on {comps!r}; declared "
            f"{fam.bound} allows {fam.bound.limit(size)}")


def gamma_step(fs: FamilySet, model: BaseModel, s: PredicateState, pool: CandidatePool,
               trace: TraceSink | None = None) -> PredicateState:
    """One application of the operator: families in order, each inflating its own Q."""
    ext = {p: dict(s.extensions[p]) for p in s.preds}
    stage = s.stage + 1
    enriched = _state_model(model, ext)
    present = set(pool.arities())
    for fam in fs.families:
        pred = fam.target
        own = ext[pred]
        admitted = []
        arities = sorted({r.selector.arity for r in fam.rules} & present)
        for k in arities:
            for word, comps in pool.with_arity(k):
                if word in own:
                    continue
                rule = fs.match(pred, comps)
                if rule is None:
                    continue
                meter = CostMeter()
                ok = eval_formula(enriched, rule.formula, dict(enumerate(comps, 1)), meter)
                _audit_bound(fam, rule, comps, meter.units)
                if ok:
                    admitted.append(Admission(stage, pred, rule.id, word, meter.units))
        for adm in admitted:
            own[adm.word] = stage
            if trace is not None:
                trace(adm)
    return PredicateState(s.preds, ext, stage)


@dataclass
class IterationReport:
    reached: bool
    steps: int
    history: list[PredicateState] = field(repr=False)

    @property
    def fixed_stage(self) -> int | None:
        """Least k with Gamma_k = Gamma_{k+1}, when one was observed."""
        return self.steps - 1 if self.reached else None


def iterate(fs: FamilySet, model: BaseModel, pool: CandidatePool, max_iters: int,
            trace: TraceSink | None = None) -> tuple[PredicateState, IterationReport]:
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    state = PredicateState.empty(fs.enrichable)
    history = [state]
    for step in range(1, max_iters + 1):
        nxt = gamma_step(fs, model, state, pool, trace)
        history.append(nxt)
        if nxt.same_extensions(state):
            return nxt, IterationReport(True, step, history)
        state = nxt
    return state, IterationReport(False, max_iters, history)


# -- brute-force oracle ----------------------------------------------------------

def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _oracle_universe(model: BaseModel, max_len: int) -> list[list[str]]:
    """Elements by exact encoded length, built from compositions of lengths."""
    by_len: list[list[str]] = [[] for _ in range(max_len + 1)]
    for n in range(1, max_len + 1):
        by_len[n].extend("".join(c) for c in itertools.product(model.alphabet.symbols, repeat=n)
                         if model.in_universe("".join(c)))
        for k in range(1, n):
            inner = n - 2 - (k - 1)
            if inner < k:
                break
            for lens in _compositions(inner, k):
                for combo in itertools.product(*(by_len[l] for l in lens)):
                    by_len[n].append("<" + ",".join(combo) + ">")
    return by_len


def _oracle_tuples(by_len: list[list[str]], k: int, max_len: int) -> list[tuple[str, ...]]:
    out = []
    for inner in range(k, max_len - 2 - (k - 1) + 1):
        for lens in _compositions(inner, k):
            out.extend(itertools.product(*(by_len[l] for l in lens)))
    return out


def oracle_extension(fs: FamilySet, model: BaseModel, max_len: int,
                     budget: int = DEFAULT_BUDGET) -> PredicateState:
    """Naive fixed point: every rule on every tuple every round, no dispatch.

    A selector's head tag is evaluated as the conjunct ``x1 = 'tag'``, and an
    audit raises DisjointnessViolation when two rules hold on one tuple in the
    same round.
    """
    size = pool_size(model, max_len)
    if size > budget:
        raise PoolTooLarge(f"{size} candidates at L={max_len} exceed budget {budget}")
    by_len = _oracle_universe(model, max(0, max_len - 2))
    arities = {r.selector.arity for r in fs.rules()}
    tuples = {k: _oracle_tuples(by_len, k, max_len) for k in arities}
    checks = []
    for fam in fs.families:
        for rule in fam.rules:
            f = rule.formula
            if rule.selector.head is not None:
                f = And((Eq(Var(1), Lit(rule.selector.head)), f))
            checks.append((fam, rule, f))

    preds = fs.enrichable
    ext: dict[str, dict[str, int]] = {p: {} for p in preds}
    enriched = _state_model(model, ext)
    stage = 0
    while True:
        stage += 1
        changed = False
        holds: dict[str, str] = {}
        for fam in fs.families:
            fresh = []
            for fam_, rule, f in checks:
                if fam_ is not fam:
                    continue
                for tup in tuples[rule.selector.arity]:
                    if not eval_formula(enriched, f, dict(enumerate(tup, 1))):
                        continue
                    word = "<" + ",".join(tup) + ">"
                    where = f"{fam.target}.{rule.id}"
                    if word in holds:
                        raise DisjointnessViolation(f"{holds[word]} and {where} both hold on {word}")
                    holds[word] = where
                    if word not in ext[fam.target]:
                        fresh.append(word)
            for word in fresh:
                ext[fam.target][word] = stage
            changed = changed or bool(fresh)
        if not changed:
            return PredicateState(preds, ext, stage)
