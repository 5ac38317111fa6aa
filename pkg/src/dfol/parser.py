"""Tokenizer and recursive-descent parser for the s-expression surface syntax."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .syntax import (
    And, App, Arrow, BANG, Base, Exists, FnApp, Forall, Formula, Impl, Judgement, Lam, Le,
    Pair, Pol, PolCtx, Pred, Prod, Proj1, Proj2, TOP, Term, Type, UNIT, Var,
)

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|;[^\n]*)
  | (?P<sym>\|-|->|<=|[()\[\]|,:!@*=+\-])
  | (?P<num>[0-9]+)
  | (?P<word>[A-Za-z_][A-Za-z0-9_']*[+\-]?)
""", re.VERBOSE)

TERM_KEYWORDS = frozenset({"pair", "pi1", "pi2", "lam", "unit"})
FORMULA_KEYWORDS = frozenset({"top", "and", "impl", "le", "pred"})
QUANTIFIERS = {f"{q}{s}": (q, p) for q in ("exists", "forall")
               for s, p in (("+", Pol.POS), ("-", Pol.NEG), ("d", Pol.DIN))}
RESERVED = TERM_KEYWORDS | FORMULA_KEYWORDS | set(QUANTIFIERS)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, source: str = "<input>", line0: int = 1) -> list[Token]:
    out = []
    pos, line, col = 0, line0, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(line, col, "a token", text[pos], source)
        chunk = m.group(0)
        if m.lastgroup != "ws":
            out.append(Token(m.lastgroup, chunk, line, col))
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


def is_identifier(s: str) -> bool:
    return bool(re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", s)) and s not in RESERVED


class Parser:
    def __init__(self, text: str, source: str = "<input>", line0: int = 1):
        self.toks = tokenize(text, source, line0)
        self.i = 0
        self.source = source

    # -- helpers

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.peek()
        self.i += 1
        return t

    def error(self, expected: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(tok.line, tok.col, expected, tok.text or "end of input", self.source)

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text or tok.kind == "eof":
            raise self.error(repr(text))
        return self.next()

    def ident(self, what: str = "an identifier") -> str:
        tok = self.peek()
        if tok.kind != "word" or not is_identifier(tok.text):
            raise self.error(what)
        return self.next().text

    def at_eof(self) -> bool:
        return self.peek().kind == "eof"

    def done(self) -> None:
        if not self.at_eof():
            raise self.error("end of input")

    # -- grammar

    def type_(self) -> Type:
        tok = self.peek()
        if tok.text == "unit":
            self.next()
            return UNIT
        if tok.text == "(":
            self.next()
            op = self.next()
            if op.text == "*":
                t = Prod(self.type_(), self.type_())
            elif op.text == "->":
                t = Arrow(self.type_(), self.type_())
            else:
                raise self.error("'*' or '->'", op)
            self.expect(")")
            return t
        return Base(self.ident("a type"))

    def term(self) -> Term:
        tok = self.peek()
        if tok.text == "!":
            self.next()
            return BANG
        if tok.text != "(":
            return Var(self.ident("a term"))
        self.next()
        head = self.peek()
        if head.text == "@":
            self.next()
            t = App(self.term(), self.term())
        elif head.text == "pair":
            self.next()
            t = Pair(self.term(), self.term())
        elif head.text == "pi1":
            self.next()
            t = Proj1(self.term())
        elif head.text == "pi2":
            self.next()
            t = Proj2(self.term())
        elif head.text == "lam":
            self.next()
            x = self.ident("a binder")
            ty = self.type_()
            t = Lam(x, ty, self.term())
        else:
            f = self.ident("a function symbol or term former")
            t = FnApp(f, self.term())
        self.expect(")")
        return t

    def formula(self) -> Formula:
        tok = self.peek()
        if tok.text == "top":
            self.next()
            return TOP
        if tok.text != "(":
            raise self.error("a formula")
        self.next()
        head = self.next()
        if head.text == "and":
            phi = And(self.formula(), self.formula())
        elif head.text == "impl":
            phi = Impl(self.formula(), self.formula())
        elif head.text == "le":
            s, t = self.term(), self.term()
            self.expect(":")
            phi = Le(s, t, self.type_())
        elif head.text == "pred":
            name = self.ident("a predicate symbol")
            phi = Pred(name, self.term(), self.term())
        elif head.text in QUANTIFIERS:
            q, pol = QUANTIFIERS[head.text]
            x = self.ident("a binder")
            self.expect(":")
            ty = self.type_()
            body = self.formula()
            phi = (Exists if q == "exists" else Forall)(pol, x, ty, body)
        else:
            raise self.error("a formula keyword", head)
        self.expect(")")
        return phi

    def binding(self) -> tuple[str, Type]:
        x = self.ident("a variable")
        self.expect(":")
        return x, self.type_()

    def zone(self) -> tuple:
        out = []
        if self.peek().text in ("|", "]"):
            return ()
        out.append(self.binding())
        while self.peek().text == ",":
            self.next()
            out.append(self.binding())
        return tuple(out)

    def polctx(self) -> PolCtx:
        self.expect("[")
        th = self.zone()
        self.expect("|")
        de = self.zone()
        self.expect("|")
        ga = self.zone()
        self.expect("]")
        return PolCtx(th, de, ga)

    def ctx(self) -> tuple:
        """A plain context ``[x : A, y : B]``."""
        self.expect("[")
        c = self.zone()
        self.expect("]")
        return c

    def judgement(self) -> Judgement:
        pc = self.polctx()
        hyps = []
        if self.peek().text != "|-":
            hyps.append(self.formula())
            while self.peek().text == ",":
                self.next()
                hyps.append(self.formula())
        self.expect("|-")
        return Judgement(pc, tuple(hyps), self.formula())


def _whole(method: str):
    def run(text: str, source: str = "<input>"):
        p = Parser(text, source)
        out = getattr(p, method)()
        p.done()
        return out
    run.__name__ = f"parse_{method.rstrip('_')}"
    return run


parse_type = _whole("type_")
parse_term = _whole("term")
parse_formula = _whole("formula")
parse_polctx = _whole("polctx")
parse_judgement = _whole("judgement")
