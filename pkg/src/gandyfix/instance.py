"""Plain-text instance files.

::

    alphabet 'ab'
    model words
    pred EvenA/1 = evencount('a') bound C=1 p=1
    func tail/1 = tail bound C=2 p=1
    func one/0 = const('a') bound C=1 p=1
    extend P { 'aa' 'bb' }
    family P bound C=6 p=1 {
      rule r1 arity=1 : EvenA(x1)
      rule r2 arity=2 : P(x1) & EvenA(x2)
    }
    bench P seed='<aa>' wrap='<#,bb>'

``#`` starts a comment outside quotes.  Base symbols must be declared before
a family uses them; enrichable predicates may be referenced before their own
family block so that families can be mutually recursive.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import ParseError, ValidationError
from .formulas import App, Diagnostic, TokenStream, atoms, parse_formula_tokens, terms_of, tokenize
from .genfam import FamilySet, GeneratingFamily, GeneratingRule, Selector, validate
from .listcodec import Alphabet
from .semantics import (
    FUNCTION_BUILTINS, PREDICATE_BUILTINS, BaseFunction, BaseModel, BasePredicate, Bound,
)


@dataclass
class BenchSetting:
    pred: str
    seed: str
    wrap: str


@dataclass
class Instance:
    alphabet: Alphabet
    model: BaseModel
    families: FamilySet
    bench: dict[str, BenchSetting] = field(default_factory=dict)
    path: str | None = None

    @property
    def signature(self):
        return self.families.signature


@dataclass
class _Decl:
    kind: str
    name: str
    line: int
    col: int
    data: dict


def _number(tok, what: str) -> str:
    if tok.kind != "number":
        raise ParseError(f"expected {what}, found {tok.text or 'end of input'!r}", tok.line, tok.col)
    return tok.text


def _int(ts: TokenStream, what: str) -> int:
    tok = ts.next()
    text = _number(tok, what)
    if not text.isdigit():
        raise ParseError(f"expected an integer {what}, found {text!r}", tok.line, tok.col)
    return int(text)


def _bound(ts: TokenStream) -> Bound:
    ts.expect("bound")
    ts.expect("C")
    ts.expect("=")
    tok = ts.next()
    C = Fraction(_number(tok, "rational C"))
    ts.expect("p")
    ts.expect("=")
    p = _int(ts, "exponent p")
    try:
        return Bound(C, p)
    except ValueError as exc:
        raise ParseError(str(exc), tok.line, tok.col) from None


def _builtin_args(ts: TokenStream) -> list:
    args: list = []
    if not ts.at("("):
        return args
    ts.next()
    while not ts.at(")"):
        tok = ts.next()
        if tok.kind == "string":
            args.append(tok.value)
        elif tok.kind == "number" and tok.text.isdigit():
            args.append(int(tok.text))
        else:
            raise ParseError(f"bad builtin argument {tok.text!r}", tok.line, tok.col)
        if not ts.at(")"):
            ts.expect(",")
    ts.expect(")")
    return args


def parse_instance(text: str) -> list[_Decl]:
    ts = TokenStream(tokenize(text))
    decls = []
    while ts.peek().kind != "eof":
        tok = ts.next()
        if tok.kind != "ident":
            raise ParseError(f"expected a declaration, found {tok.text!r}", tok.line, tok.col)
        kw = tok.text
        if kw == "alphabet":
            decls.append(_Decl(kw, "", tok.line, tok.col,
                               {"symbols": ts.expect_kind("string", "quoted alphabet").value}))
        elif kw == "model":
            name = ts.expect_kind("ident", "model name")
            if name.text != "words":
                raise ParseError(f"unknown model {name.text!r}", name.line, name.col)
            decls.append(_Decl(kw, name.text, tok.line, tok.col, {}))
        elif kw in ("pred", "func"):
            name = ts.expect_kind("ident", f"{kw} name").text
            ts.expect("/")
            arity = _int(ts, "arity")
            ts.expect("=")
            b = ts.expect_kind("ident", "builtin name")
            table = PREDICATE_BUILTINS if kw == "pred" else FUNCTION_BUILTINS
            if b.text not in table:
                raise ParseError(f"unknown {kw} builtin {b.text!r}", b.line, b.col)
            args = _builtin_args(ts)
            bound = _bound(ts)
            decls.append(_Decl(kw, name, tok.line, tok.col,
                               {"arity": arity, "builtin": b.text, "args": args, "bound": bound}))
        elif kw == "extend":
            name = ts.expect_kind("ident", "predicate name").text
            ts.expect("{")
            words = []
            while not ts.at("}"):
                words.append(ts.expect_kind("string", "quoted word").value)
            ts.expect("}")
            decls.append(_Decl(kw, name, tok.line, tok.col, {"words": words}))
        elif kw == "family":
            name = ts.expect_kind("ident", "predicate name").text
            bound = _bound(ts)
            ts.expect("{")
            rules = []
            while not ts.at("}"):
                rt = ts.expect("rule")
                rid = ts.expect_kind("ident", "rule id").text
                ts.expect("arity")
                ts.expect("=")
                arity = _int(ts, "arity")
                head = None
                if ts.at("head"):
                    ts.next()
                    ts.expect("=")
                    head = ts.expect_kind("string", "quoted head tag").value
                ts.expect(":")
                formula = parse_formula_tokens(ts)
                try:
                    selector = Selector(arity, head)
                except ValueError as exc:
                    raise ParseError(str(exc), rt.line, rt.col) from None
                rules.append(GeneratingRule(rid, selector, formula, name, rt.line, rt.col))
            ts.expect("}")
            decls.append(_Decl(kw, name, tok.line, tok.col, {"bound": bound, "rules": rules}))
        elif kw == "bench":
            name = ts.expect_kind("ident", "predicate name").text
            ts.expect("seed")
            ts.expect("=")
            seed = ts.expect_kind("string", "quoted seed").value
            ts.expect("wrap")
            ts.expect("=")
            wrap = ts.expect_kind("string", "quoted wrap template").value
            decls.append(_Decl(kw, name, tok.line, tok.col, {"seed": seed, "wrap": wrap}))
        else:
            raise ParseError(f"unknown declaration {kw!r}", tok.line, tok.col)
    return decls


def build_instance(decls: list[_Decl], path: str | None = None) -> Instance:
    diags: list[Diagnostic] = []

    def err(code: str, message: str, d: _Decl) -> None:
        diags.append(Diagnostic(code, message, None, d.line, d.col))

    alphabets = [d for d in decls if d.kind == "alphabet"]
    models = [d for d in decls if d.kind == "model"]
    if len(alphabets) != 1:
        if alphabets:
            err("alphabet", "alphabet declared more than once", alphabets[1])
        raise ValidationError(diags or [Diagnostic("alphabet", "no alphabet declared")])
    try:
        alphabet = Alphabet(alphabets[0].data["symbols"])
    except ValueError as exc:
        err("alphabet", str(exc), alphabets[0])
        raise ValidationError(diags) from None
    if not models:
        diags.append(Diagnostic("model", "no model declared"))
    elif len(models) > 1:
        err("model", "model declared more than once", models[1])

    def word_ok(w: str, d: _Decl, what: str) -> None:
        if not alphabet.is_word(w):
            err("constant", f"{what} '{w}' is not a word over '{alphabet.symbols}'", d)

    preds: dict[str, BasePredicate] = {}
    funcs: dict[str, BaseFunction] = {}
    declared_at: dict[str, int] = {}
    families: list[GeneratingFamily] = []
    family_decl: dict[str, _Decl] = {}
    for i, d in enumerate(decls):
        if d.kind in ("pred", "func"):
            if d.name in declared_at:
                err("duplicate-symbol", f"{d.name!r} declared twice", d)
                continue
            table = PREDICATE_BUILTINS if d.kind == "pred" else FUNCTION_BUILTINS
            factory, arity = table[d.data["builtin"]]
            if d.data["arity"] != arity:
                err("arity", f"builtin {d.data['builtin']} has arity {arity}, "
                             f"declared {d.data['arity']}", d)
                continue
            for a in d.data["args"]:
                if isinstance(a, str):
                    word_ok(a, d, "argument")
            try:
                impl = factory(*d.data["args"])
            except (TypeError, ValueError) as exc:
                err("builtin", f"{d.data['builtin']}{tuple(d.data['args'])}: {exc}", d)
                continue
            declared_at[d.name] = i
            cls = BasePredicate if d.kind == "pred" else BaseFunction
            entry = cls(d.name, arity, impl, d.data["bound"], d.data["builtin"])
            (preds if d.kind == "pred" else funcs)[d.name] = entry
        elif d.kind == "family":
            if d.name in family_decl:
                err("duplicate-family", f"second family for {d.name!r}", d)
                continue
            family_decl[d.name] = d
            families.append(GeneratingFamily(d.name, tuple(d.data["rules"]), d.data["bound"],
                                             d.line, d.col))
            declared_at.setdefault(d.name, i)

    enrichable = [f.target for f in families]
    for name in enrichable:
        if name in preds or name in funcs:
            err("target", f"{name!r} is a base symbol and cannot be enriched", family_decl[name])

    extensions: dict[str, frozenset[str]] = {}
    bench: dict[str, BenchSetting] = {}
    for d in decls:
        if d.kind == "extend":
            if d.name not in family_decl:
                err("unknown-symbol", f"extend of {d.name!r}, which has no family", d)
                continue
            for w in d.data["words"]:
                word_ok(w, d, "extension word")
            extensions[d.name] = extensions.get(d.name, frozenset()) | frozenset(d.data["words"])
        elif d.kind == "bench":
            if d.name not in family_decl:
                err("unknown-symbol", f"bench for {d.name!r}, which has no family", d)
                continue
            bench[d.name] = BenchSetting(d.name, d.data["seed"], d.data["wrap"])
        elif d.kind == "family":
            order = decls.index(d)
            for rule in d.data["rules"]:
                used = {a.pred for _, a in atoms(rule.formula)}
                used |= {t.fn for t in terms_of(rule.formula) if isinstance(t, App)}
                for name in sorted(used):
                    if name in declared_at and name not in family_decl and declared_at[name] > order:
                        diags.append(Diagnostic("declared-after-use",
                                                f"{name!r} is declared after its use",
                                                rule.id, rule.line, rule.col))

    model = BaseModel(alphabet, preds, funcs, extensions)
    signature = model.signature(enrichable=tuple(n for n in enrichable if n not in preds))
    fs = FamilySet(families, signature, alphabet)
    diags.extend(validate(fs))
    if diags:
        raise ValidationError(diags)
    return Instance(alphabet, model, fs, bench, path)


def loads(text: str, path: str | None = None) -> Instance:
    return build_instance(parse_instance(text), path)


def load(path: str | Path) -> Instance:
    """Parse and fully validate an instance file."""
    p = Path(path)
    return loads(p.read_text(encoding="utf-8"), str(p))
