"""Concrete syntax for quantified specifications.

Grammar (# starts a line comment, whitespace is insignificant):

    formula  := quant* body
    quant    := ("forall" | "exists") IDENT "."
    body     := iff
    iff      := xor ("<->" xor)*
    xor      := impl ("^" impl)*
    impl     := or ("->" impl)?
    or       := and ("|" and)*
    and      := unary ("&" unary)*
    unary    := "!" unary | "X" unary | "G" unary | "F" unary
              | atomOrParen (("U" | "W" | "R") unary)?
    atomOrParen := "true" | "false" | IDENT "@" IDENT | "(" body ")"

Indexed atoms are written ``prop@var``.  The operator names X G F U W R and
the keywords forall/exists/true/false are reserved and cannot be used as
identifiers.
"""

import re

from .errors import DuplicateBinderError, FormulaSyntaxError, UnboundVariableError
from .formula import (
    EXISTS,
    FALSE,
    FORALL,
    TRUE,
    And,
    Atom,
    AtomRef,
    Eventually,
    Globally,
    Iff,
    Implies,
    Next,
    Not,
    Or,
    QuantifiedFormula,
    Release,
    Until,
    WeakUntil,
    Xor,
)

_KEYWORDS = {"forall", "exists", "true", "false", "X", "G", "F", "U", "W", "R"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<iff><->)
  | (?P<arrow>->)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[()@.!&|^])
    """,
    re.VERBOSE,
)


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text: str):
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos - line_start + 1
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        col = pos - line_start + 1
        if kind == "ws":
            line += tok.count("\n")
            if "\n" in tok:
                line_start = pos + tok.rindex("\n") + 1
        elif kind == "comment":
            pass
        elif kind == "ident":
            if tok in _KEYWORDS:
                tokens.append(_Token(tok, tok, line, col))
            else:
                tokens.append(_Token("IDENT", tok, line, col))
        elif kind in ("iff", "arrow"):
            tokens.append(_Token(tok, tok, line, col))
        else:
            tokens.append(_Token(tok, tok, line, col))
        pos = m.end()
    tokens.append(_Token("EOF", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.bound = []

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise FormulaSyntaxError(
                f"expected {kind!r}, found {tok.text or 'end of input'!r}",
                tok.line,
                tok.col,
            )
        return self.take()

    def error(self, msg: str, tok: _Token = None):
        tok = tok or self.peek()
        raise FormulaSyntaxError(msg, tok.line, tok.col)

    def parse(self) -> QuantifiedFormula:
        prefix = []
        while self.peek().kind in (FORALL, EXISTS):
            quant = self.take().kind
            name = self.expect("IDENT")
            if name.text in (v for _, v in prefix):
                raise DuplicateBinderError(
                    f"variable {name.text!r} bound more than once",
                    name.line,
                    name.col,
                )
            self.expect(".")
            prefix.append((quant, name.text))
        self.bound = [v for _, v in prefix]
        body = self.body()
        tok = self.peek()
        if tok.kind != "EOF":
            self.error(f"unexpected {tok.text!r} after formula", tok)
        return QuantifiedFormula(tuple(prefix), body)

    def body(self):
        return self.iff()

    def iff(self):
        f = self.xor()
        while self.peek().kind == "<->":
            self.take()
            f = Iff(f, self.xor())
        return f

    def xor(self):
        f = self.impl()
        while self.peek().kind == "^":
            self.take()
            f = Xor(f, self.impl())
        return f

    def impl(self):
        f = self.or_()
        if self.peek().kind == "->":
            self.take()
            return Implies(f, self.impl())
        return f

    def or_(self):
        parts = [self.and_()]
        while self.peek().kind == "|":
            self.take()
            parts.append(self.and_())
        if len(parts) == 1:
            return parts[0]
        return Or(tuple(parts))

    def and_(self):
        parts = [self.unary()]
        while self.peek().kind == "&":
            self.take()
            parts.append(self.unary())
        if len(parts) == 1:
            return parts[0]
        return And(tuple(parts))

    def unary(self):
        kind = self.peek().kind
        if kind == "!":
            self.take()
            return Not(self.unary())
        if kind == "X":
            self.take()
            return Next(self.unary())
        if kind == "G":
            self.take()
            return Globally(self.unary())
        if kind == "F":
            self.take()
            return Eventually(self.unary())
        f = self.atom_or_paren()
        kind = self.peek().kind
        if kind in ("U", "W", "R"):
            self.take()
            rhs = self.unary()
            cls = {"U": Until, "W": WeakUntil, "R": Release}[kind]
            return cls(f, rhs)
        return f

    def atom_or_paren(self):
        tok = self.peek()
        if tok.kind == "true":
            self.take()
            return TRUE
        if tok.kind == "false":
            self.take()
            return FALSE
        if tok.kind == "(":
            self.take()
            f = self.body()
            self.expect(")")
            return f
        if tok.kind == "IDENT":
            prop = self.take()
            self.expect("@")
            var = self.expect("IDENT")
            if var.text not in self.bound:
                raise UnboundVariableError(
                    f"unbound trace variable {var.text!r}", var.line, var.col
                )
            return Atom(AtomRef(prop.text, var.text))
        self.error(f"expected an atom, found {tok.text or 'end of input'!r}")


def parse_formula(text: str) -> QuantifiedFormula:
    """Parse a quantified specification from text."""
    return _Parser(text).parse()
