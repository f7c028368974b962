"""Concrete syntax for lambda terms and CL terms.

Grammar::

    term   ::= lambda | atom+ [lambda]
    lambda ::= ("\\" | "λ") ident+ "." term
    atom   ::= ident | combinator | "(" term ")"

Identifiers start with a lowercase letter and continue with letters,
digits or ``_``. The combinator tokens are ``S K I B C S' B' C' B*``
(``′`` is accepted for ``'``). Application is left-associative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .terms import Abs, App, Combinator, Prim, Term, Var, spine

COMBINATOR_TOKENS = frozenset(c.value for c in Combinator)

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<lam>\\|λ)
  | (?P<dot>\.)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<upper>[A-Z][A-Za-z0-9_]*['′*]?)
""", re.VERBOSE)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected: Iterable[str] = ()):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{line}:{column}: {message}{detail}")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(src: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, col)
        kind, text = m.lastgroup, m.group()
        if kind == "upper":
            if text.replace("′", "'") not in COMBINATOR_TOKENS:
                raise ParseError(f"unknown combinator {text!r}", line, col,
                                 COMBINATOR_TOKENS)
            kind = "comb"
        if kind == "ws":
            nl = text.count("\n")
            if nl:
                line += nl
                line_start = pos + text.rindex("\n") + 1
        else:
            tokens.append(Token(kind, text, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


_ATOM_START = {"ident", "comb", "lpar"}
_DESCRIBE = {"ident": "variable", "comb": "combinator", "lpar": "'('", "rpar": "')'",
             "lam": "'\\'", "dot": "'.'", "eof": "end of input"}


class _Parser:
    def __init__(self, src: str, allow_lambda: bool):
        self.tokens = tokenize(src)
        self.i = 0
        self.allow_lambda = allow_lambda

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def fail(self, expected):
        t = self.tok
        found = repr(t.text) if t.text else "end of input"
        raise ParseError(f"unexpected {found}", t.line, t.column,
                         (_DESCRIBE[k] for k in expected))

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            self.fail({kind})
        t = self.tok
        self.i += 1
        return t

    def parse(self) -> Term:
        t = self.term()
        if self.tok.kind != "eof":
            self.fail(_ATOM_START | {"eof"})
        return t

    def term(self) -> Term:
        if self.tok.kind == "lam":
            return self.abstraction()
        t = self.atom()
        while True:
            if self.tok.kind in _ATOM_START:
                t = App(t, self.atom())
            elif self.tok.kind == "lam":
                return App(t, self.abstraction())
            else:
                return t

    def abstraction(self) -> Term:
        if not self.allow_lambda:
            t = self.tok
            raise ParseError("CL terms contain no λ", t.line, t.column)
        self.expect("lam")
        names = [self.expect("ident").text]
        while self.tok.kind == "ident":
            names.append(self.tok.text)
            self.i += 1
        self.expect("dot")
        body = self.term()
        for n in reversed(names):
            body = Abs(n, body)
        return body

    def atom(self) -> Term:
        t = self.tok
        if t.kind == "ident":
            self.i += 1
            return Var(t.text)
        if t.kind == "comb":
            self.i += 1
            return Prim(Combinator.from_token(t.text))
        if t.kind == "lpar":
            self.i += 1
            inner = self.term()
            self.expect("rpar")
            return inner
        if t.kind == "lam" and not self.allow_lambda:
            raise ParseError("CL terms contain no λ", t.line, t.column)
        self.fail(_ATOM_START | ({"lam"} if self.allow_lambda else set()))


def parse_lambda(src: str) -> Term:
    return _Parser(src, allow_lambda=True).parse()


def parse_cl(src: str) -> Term:
    """Parse an abstraction-free term; any λ is a :class:`ParseError`."""
    return _Parser(src, allow_lambda=False).parse()


def print_term(t: Term) -> str:
    """Render with minimal parentheses; the result re-parses to ``t``."""
    match t:
        case Var(name):
            return name
        case Prim(c):
            return c.value
        case Abs():
            names = []
            while isinstance(t, Abs):
                names.append(t.var)
                t = t.body
            return "\\" + " ".join(names) + ". " + print_term(t)
    head, args = spine(t)
    parts = [_wrap(head, arg_position=False)]
    parts.extend(_wrap(a, arg_position=True) for a in args)
    return " ".join(parts)


def _wrap(t: Term, arg_position: bool) -> str:
    if isinstance(t, Abs) or (arg_position and isinstance(t, App)):
        return f"({print_term(t)})"
    return print_term(t)


print_lambda = print_term
print_cl = print_term


def read_corpus(text: str) -> list[str]:
    """Non-blank, non-comment lines of a one-term-per-line corpus."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return lines
