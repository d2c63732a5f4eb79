"""Base models with partial functions, enrichment layers, and truth evaluation.

Terms may be undefined; an undefined term makes an equality false and makes
any atom it appears in false.  Connectives are classical on top of that.
Every base-model call reports its own work, which is checked against the
declared ``C * n**p`` bound before it is charged to the meter.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .errors import CostBoundViolation, UnboundedQuantifier, UnboundVariable
from .formulas import And, App, Atom, Eq, Formula, Implies, Lit, Not, Or, Quant, Term, Truth, Var
from .listcodec import Alphabet
from .meter import CostMeter

Valuation = Mapping[int, str]


@dataclass(frozen=True)
class Bound:
    C: Fraction
    p: int

    def __post_init__(self) -> None:
        if self.C <= 0 or self.p < 1:
            raise ValueError(f"bound needs C > 0 and p >= 1, got C={self.C} p={self.p}")

    def limit(self, n: int) -> Fraction:
        # Sizes are clamped to 1 so zero-length inputs still get a unit budget.
        return self.C * max(n, 1) ** self.p

    def __str__(self) -> str:
        return f"C={self.C} p={self.p}"


# A builtin takes the argument words and returns (result, units of work).
PredicateImpl = Callable[..., "tuple[bool, int]"]
FunctionImpl = Callable[..., "tuple[str | None, int]"]


@dataclass(frozen=True)
class BasePredicate:
    name: str
    arity: int
    impl: PredicateImpl
    bound: Bound
    builtin: str = ""


@dataclass(frozen=True)
class BaseFunction:
    name: str
    arity: int
    impl: FunctionImpl
    bound: Bound
    builtin: str = ""


def _charge(meter: CostMeter, name: str, bound: Bound, args: Sequence[str], units: int) -> None:
    size = sum(len(a) for a in args)
    if units > bound.limit(size):
        raise CostBoundViolation(
            f"{name}{tuple(args)!r} used {units} units, declared bound {bound} allows "
            f"{bound.limit(size)} at n={size}")
    meter.base += units


# -- the words(Σ0) builtin zoo ----------------------------------------------

def evencount(ch: str) -> PredicateImpl:
    def impl(w: str) -> tuple[bool, int]:
        return w.count(ch) % 2 == 0, len(w)
    return impl


def lenmod(k: int, r: int) -> PredicateImpl:
    if k < 1 or not 0 <= r < k:
        raise ValueError(f"lenmod needs k >= 1 and 0 <= r < k, got ({k}, {r})")

    def impl(w: str) -> tuple[bool, int]:
        return len(w) % k == r, len(w)
    return impl


def hasprefix(u: str) -> PredicateImpl:
    def impl(w: str) -> tuple[bool, int]:
        return w.startswith(u), min(len(u), len(w)) + 1
    return impl


def concat() -> FunctionImpl:
    def impl(a: str, b: str) -> tuple[str, int]:
        return a + b, len(a) + len(b)
    return impl


def tail() -> FunctionImpl:
    def impl(w: str) -> tuple[str | None, int]:
        if not w:
            return None, 1
        return w[1:], len(w)
    return impl


def const(u: str) -> FunctionImpl:
    def impl() -> tuple[str, int]:
        return u, 1
    return impl


PREDICATE_BUILTINS = {"evencount": (evencount, 1), "lenmod": (lenmod, 1), "hasprefix": (hasprefix, 1)}
FUNCTION_BUILTINS = {"concat": (concat, 2), "tail": (tail, 1), "const": (const, 0)}


# -- models ------------------------------------------------------------------

@dataclass(frozen=True)
class Signature:
    functions: Mapping[str, int]
    predicates: Mapping[str, int]
    enrichable: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        clash = set(self.functions) & set(self.predicates)
        if clash:
            raise ValueError(f"names used as both function and predicate: {sorted(clash)}")
        for p in self.enrichable:
            if self.predicates.get(p) != 1:
                raise ValueError(f"enrichable predicate {p!r} must be a unary predicate")

    def is_enrichable(self, name: str) -> bool:
        return name in self.enrichable


@dataclass
class BaseModel:
    """A p-computable base structure over words of ``alphabet``.

    ``extensions`` holds the base extension of each enrichable predicate,
    i.e. the base words on which it holds before any enrichment.
    """

    alphabet: Alphabet
    predicates: dict[str, BasePredicate] = field(default_factory=dict)
    functions: dict[str, BaseFunction] = field(default_factory=dict)
    extensions: dict[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._outside = re.compile("[^" + re.escape(self.alphabet.symbols) + "]")

    def in_universe(self, word: str, meter: CostMeter | None = None) -> bool:
        m = self._outside.search(word)
        if meter is not None:
            meter.base += m.start() + 1 if m else len(word)
        return m is None

    def signature(self, enrichable: Sequence[str] = ()) -> Signature:
        preds = {name: p.arity for name, p in self.predicates.items()}
        for name in enrichable:
            preds.setdefault(name, 1)
        return Signature({n: f.arity for n, f in self.functions.items()}, preds, tuple(enrichable))

    def call_predicate(self, name: str, args: Sequence[str], meter: CostMeter) -> bool:
        pred = self.predicates[name]
        for a in args:
            if a[:1] == "<":
                # Generated elements lie outside every base extension.
                meter.base += 1
                return False
        value, units = pred.impl(*args)
        _charge(meter, name, pred.bound, args, units)
        return value

    def call_function(self, name: str, args: Sequence[str], meter: CostMeter) -> str | None:
        fn = self.functions[name]
        for a in args:
            if a[:1] == "<":
                meter.base += 1
                return None
        value, units = fn.impl(*args)
        _charge(meter, name, fn.bound, args, units)
        return value

    def base_extension(self, pred: str) -> frozenset[str]:
        return self.extensions.get(pred, frozenset())


def words_model(alphabet: str | Alphabet, *, predicates=(), functions=(), extensions=None) -> BaseModel:
    """Convenience constructor for the built-in words model."""
    alpha = alphabet if isinstance(alphabet, Alphabet) else Alphabet(alphabet)
    return BaseModel(
        alpha,
        {p.name: p for p in predicates},
        {f.name: f for f in functions},
        {k: frozenset(v) for k, v in (extensions or {}).items()},
    )


# A layer answers an enrichable predicate on elements beyond its base extension.
Layer = Callable[[str, CostMeter], bool]


@dataclass
class EnrichedModel:
    """A base model with enrichment layers stacked on it, in application order.

    Base predicates and functions are untouched by enrichment: they stay
    false, respectively undefined, on every generated element.
    """

    base: BaseModel
    layers: tuple[tuple[str, Layer], ...] = ()

    def __post_init__(self) -> None:
        self._layer = dict(self.layers)

    def enrichable_holds(self, pred: str, word: str, meter: CostMeter) -> bool:
        if word in self.base.extensions.get(pred, ()):
            return True
        layer = self._layer.get(pred)
        return layer is not None and layer(word, meter)

    def is_enrichable(self, pred: str) -> bool:
        return pred in self._layer or pred in self.base.extensions


def as_enriched(model: BaseModel | EnrichedModel) -> EnrichedModel:
    return model if isinstance(model, EnrichedModel) else EnrichedModel(model)


def eval_term(model: BaseModel | EnrichedModel, t: Term, g: Valuation,
              meter: CostMeter | None = None) -> str | None:
    """Value of ``t`` under ``g``, or None when undefined."""
    return _term(as_enriched(model).base, t, g, meter if meter is not None else CostMeter())


def _term(base: BaseModel, t: Term, g: Valuation, meter: CostMeter) -> str | None:
    meter.nodes += 1
    if type(t) is Var:
        try:
            return g[t.index]
        except KeyError:
            raise UnboundVariable(f"x{t.index} is not bound by the valuation") from None
    if type(t) is Lit:
        return t.word
    args = []
    for a in t.args:
        v = _term(base, a, g, meter)
        if v is None:
            return None
        args.append(v)
    return base.call_function(t.fn, args, meter)


def eval_formula(model: BaseModel | EnrichedModel, f: Formula, g: Valuation,
                 meter: CostMeter | None = None) -> bool:
    m = as_enriched(model)
    return _formula(m, m.base, f, g, meter if meter is not None else CostMeter())


def _formula(m: EnrichedModel, base: BaseModel, f: Formula, g: Valuation, meter: CostMeter) -> bool:
    meter.nodes += 1
    kind = type(f)
    if kind is Atom:
        args = []
        for a in f.args:
            v = _term(base, a, g, meter)
            if v is None:
                return False
            args.append(v)
        if f.pred in base.predicates:
            return base.call_predicate(f.pred, args, meter)
        return m.enrichable_holds(f.pred, args[0], meter)
    if kind is And:
        for part in f.parts:
            if not _formula(m, base, part, g, meter):
                return False
        return True
    if kind is Or:
        for part in f.parts:
            if _formula(m, base, part, g, meter):
                return True
        return False
    if kind is Eq:
        left = _term(base, f.left, g, meter)
        if left is None:
            return False
        right = _term(base, f.right, g, meter)
        if right is None:
            return False
        meter.base += min(len(left), len(right)) + 1
        return left == right
    if kind is Not:
        return not _formula(m, base, f.body, g, meter)
    if kind is Truth:
        return f.value
    if kind is Implies:
        return (not _formula(m, base, f.premise, g, meter)) or _formula(m, base, f.conclusion, g, meter)
    if kind is Quant:
        if f.pool is None:
            raise UnboundedQuantifier(f"quantifier over x{f.var} has no finite pool")
        want = f.kind == "exists"
        for value in f.pool:
            inner = dict(g)
            inner[f.var] = value
            if _formula(m, base, f.body, inner, meter) == want:
                return want
        return not want
    raise TypeError(f"not a formula: {f!r}")


def is_member(model: EnrichedModel, word: str, meter: CostMeter | None = None) -> bool:
    """Membership in the enriched universe: a base element or in some enriched predicate."""
    meter = meter if meter is not None else CostMeter()
    if model.base.in_universe(word, meter):
        return True
    return any(layer(word, meter) for _, layer in model.layers)
