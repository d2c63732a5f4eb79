"""Terms and formulas: AST, concrete syntax, and syntactic checks.

Concrete syntax (whitespace insignificant)::

    formula := disj
    disj    := conj ("|" conj)*
    conj    := lit ("&" lit)*
    lit     := "!" atom | atom | "(" formula ")"
    atom    := IDENT "(" term ("," term)* ")" | term "=" term
    term    := VAR | CONST | IDENT "(" [term ("," term)*] ")"

``VAR`` is ``x1``, ``x2``, ...; ``CONST`` is a quoted word ``'ab'``.  A
zero-argument application ``c()`` denotes a signature constant.
Implication and quantifiers exist in the AST but have no concrete syntax.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import ParseError


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Lit:
    word: str


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple[Term, ...] = ()


Term = Union[Var, Lit, App]


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Not:
    body: Formula


@dataclass(frozen=True)
class And:
    parts: tuple[Formula, ...]


@dataclass(frozen=True)
class Or:
    parts: tuple[Formula, ...]


@dataclass(frozen=True)
class Implies:
    premise: Formula
    conclusion: Formula


@dataclass(frozen=True)
class Quant:
    kind: str  # "exists" or "forall"
    var: int
    body: Formula
    pool: tuple[str, ...] | None = None


@dataclass(frozen=True)
class Truth:
    """A truth constant; produced when enrichable atoms are substituted away."""

    value: bool


Formula = Union[Eq, Atom, Not, And, Or, Implies, Quant, Truth]


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    rule: str | None = None
    line: int | None = None
    col: int | None = None
    path: tuple[int, ...] = ()

    def __str__(self) -> str:
        bits = [self.code]
        if self.line is not None:
            bits.append(f"{self.line}:{self.col}")
        if self.rule is not None:
            bits.append(f"rule {self.rule}")
        if self.path:
            bits.append("@" + ".".join(map(str, self.path)))
        return " ".join(bits) + ": " + self.message


# -- tokens ------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<string>'[^'\n]*')
  | (?P<number>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<punct>[()\[\]{},=!&|:/]|¬)
""", re.VERBOSE)

_VAR_RE = re.compile(r"x[1-9][0-9]*\Z")


@dataclass(frozen=True)
class Token:
    kind: str  # ident | string | number | punct | eof
    text: str
    line: int
    col: int

    @property
    def value(self) -> str:
        return self.text[1:-1] if self.kind == "string" else self.text


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tok_text = m.group()
            if tok_text == "¬":
                tok_text = "!"
            tokens.append(Token(kind, tok_text, line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, text: str, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        return tok.kind in ("punct", "ident") and tok.text == text

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text or tok.kind not in ("punct", "ident"):
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}",
                             tok.line, tok.col)
        return tok

    def expect_kind(self, kind: str, what: str) -> Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {what}, found {tok.text or 'end of input'!r}",
                             tok.line, tok.col)
        return tok

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)


# -- parser ------------------------------------------------------------------

def is_var_name(name: str) -> bool:
    return _VAR_RE.match(name) is not None


def parse_formula_tokens(ts: TokenStream) -> Formula:
    parts = [_conj(ts)]
    while ts.at("|"):
        ts.next()
        parts.append(_conj(ts))
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def _conj(ts: TokenStream) -> Formula:
    parts = [_lit(ts)]
    while ts.at("&"):
        ts.next()
        parts.append(_lit(ts))
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def _lit(ts: TokenStream) -> Formula:
    if ts.at("!"):
        ts.next()
        if ts.at("("):
            raise ts.error("negation applies only to atomic formulas")
        return Not(_atom(ts))
    if ts.at("("):
        ts.next()
        inner = parse_formula_tokens(ts)
        ts.expect(")")
        return inner
    return _atom(ts)


def _atom(ts: TokenStream) -> Formula:
    tok = ts.peek()
    if tok.kind == "ident" and not is_var_name(tok.text) and ts.at("(", 1):
        ts.next()
        args = _args(ts)
        if ts.at("="):
            ts.next()
            return Eq(App(tok.text, args), _term(ts))
        if not args:
            raise ParseError(f"predicate {tok.text!r} needs at least one argument",
                             tok.line, tok.col)
        return Atom(tok.text, args)
    left = _term(ts)
    ts.expect("=")
    return Eq(left, _term(ts))


def _args(ts: TokenStream) -> tuple[Term, ...]:
    ts.expect("(")
    if ts.at(")"):
        ts.next()
        return ()
    args = [_term(ts)]
    while ts.at(","):
        ts.next()
        args.append(_term(ts))
    ts.expect(")")
    return tuple(args)


def _term(ts: TokenStream) -> Term:
    tok = ts.next()
    if tok.kind == "string":
        return Lit(tok.value)
    if tok.kind == "ident":
        if is_var_name(tok.text):
            return Var(int(tok.text[1:]))
        if not ts.at("("):
            raise ParseError(f"expected '(' after function symbol {tok.text!r}",
                             tok.line, tok.col)
        return App(tok.text, _args(ts))
    raise ParseError(f"expected a term, found {tok.text or 'end of input'!r}", tok.line, tok.col)


def parse_formula(text: str) -> Formula:
    ts = TokenStream(tokenize(text))
    formula = parse_formula_tokens(ts)
    if ts.peek().kind != "eof":
        raise ts.error(f"unexpected {ts.peek().text!r} after formula")
    return formula


def parse_term(text: str) -> Term:
    ts = TokenStream(tokenize(text))
    term = _term(ts)
    if ts.peek().kind != "eof":
        raise ts.error(f"unexpected {ts.peek().text!r} after term")
    return term


# -- printing ----------------------------------------------------------------

def format_term(t: Term) -> str:
    match t:
        case Var(i):
            return f"x{i}"
        case Lit(w):
            return f"'{w}'"
        case App(fn, args):
            return f"{fn}({', '.join(format_term(a) for a in args)})"
    raise TypeError(t)


def format_formula(f: Formula) -> str:
    match f:
        case Eq(a, b):
            return f"{format_term(a)} = {format_term(b)}"
        case Atom(p, args):
            return f"{p}({', '.join(format_term(a) for a in args)})"
        case Not(body):
            inner = format_formula(body)
            return f"!{inner}" if isinstance(body, (Atom, Eq)) else f"!({inner})"
        case And(parts):
            return " & ".join(_wrap(p, (Or, Implies, Quant)) for p in parts)
        case Or(parts):
            return " | ".join(_wrap(p, (Implies, Quant)) for p in parts)
        case Implies(a, b):
            return f"({format_formula(a)}) -> ({format_formula(b)})"
        case Quant(kind, v, body, _):
            return f"{kind} x{v}. ({format_formula(body)})"
        case Truth(value):
            return "true" if value else "false"
    raise TypeError(f)


def _wrap(f: Formula, kinds) -> str:
    text = format_formula(f)
    return f"({text})" if isinstance(f, kinds) else text


# -- traversal and syntactic checks -----------------------------------------

def subformulas(f: Formula, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Formula]]:
    yield path, f
    match f:
        case Not(body) | Quant(_, _, body, _):
            yield from subformulas(body, path + (0,))
        case And(parts) | Or(parts):
            for i, part in enumerate(parts):
                yield from subformulas(part, path + (i,))
        case Implies(a, b):
            yield from subformulas(a, path + (0,))
            yield from subformulas(b, path + (1,))


def term_vars(t: Term) -> set[int]:
    match t:
        case Var(i):
            return {i}
        case App(_, args):
            out: set[int] = set()
            for a in args:
                out |= term_vars(a)
            return out
    return set()


def free_vars(f: Formula) -> set[int]:
    match f:
        case Eq(a, b):
            return term_vars(a) | term_vars(b)
        case Atom(_, args):
            out: set[int] = set()
            for a in args:
                out |= term_vars(a)
            return out
        case Not(body):
            return free_vars(body)
        case And(parts) | Or(parts):
            out = set()
            for p in parts:
                out |= free_vars(p)
            return out
        case Implies(a, b):
            return free_vars(a) | free_vars(b)
        case Quant(_, v, body, _):
            return free_vars(body) - {v}
    return set()


def atoms(f: Formula) -> Iterator[tuple[tuple[int, ...], Atom]]:
    for path, sub in subformulas(f):
        if isinstance(sub, Atom):
            yield path, sub


def terms_of(f: Formula) -> Iterator[Term]:
    for _, sub in subformulas(f):
        if isinstance(sub, Eq):
            yield from _walk_term(sub.left)
            yield from _walk_term(sub.right)
        elif isinstance(sub, Atom):
            for a in sub.args:
                yield from _walk_term(a)


def _walk_term(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from _walk_term(a)


def check_generator_eligible(f: Formula) -> list[Diagnostic]:
    """Violations of: quantifier-free, implication-free, negation only on atoms."""
    out = []
    for path, sub in subformulas(f):
        if isinstance(sub, Quant):
            out.append(Diagnostic("eligibility", f"quantifier '{sub.kind}' not allowed", path=path))
        elif isinstance(sub, Implies):
            out.append(Diagnostic("eligibility", "implication not allowed", path=path))
        elif isinstance(sub, Not) and not isinstance(sub.body, (Atom, Eq)):
            out.append(Diagnostic("eligibility", "negation applied to a non-atomic formula",
                                  path=path))
    return out


def check_positive(f: Formula, pred: str) -> bool:
    return not any(isinstance(sub, Not) and isinstance(sub.body, Atom) and sub.body.pred == pred
                   for _, sub in subformulas(f))
