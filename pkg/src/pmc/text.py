"""Concrete syntax for diagram terms.

Grammar::

    term  := seq
    seq   := par { ";" par }
    par   := atom { "*" atom }
    atom  := IDENT | "id[" word "]" | "copy[" word "]" | "del[" word "]"
           | "cmp[" word "]" | "cap[" word "]" | "swap[" word "|" word "]"
           | "unit[" word "]" | "(" term ")"
    word  := [ IDENT { "," IDENT } ]

``*`` binds tighter than ``;``; both associate to the left.  Whitespace is
insignificant and ``#`` starts a comment running to the end of the line.
Spans are byte offsets into the UTF-8 encoding of the source.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .diagram import (
    Cap, Compare, Copy, Discard, Gen, Id, ObjectType, Par, Seq, Signature, Swap, Term, Unit,
)
from .errors import DiagramSyntaxError, UnknownGenerator

KEYWORDS = {
    "id": Id,
    "copy": Copy,
    "del": Discard,
    "cmp": Compare,
    "cap": Cap,
    "unit": Unit,
    "swap": Swap,
}

_TOKEN = re.compile(
    rb"(?P<ws>\s+|\#[^\n]*)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[;*()\[\],|])"
)


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", a punctuation character, or "eof"
    text: str
    span: SourceSpan


def tokenize(text: str) -> list[Token]:
    data = text.encode("utf-8")
    pos, out = 0, []
    while pos < len(data):
        m = _TOKEN.match(data, pos)
        if m is None:
            bad = data[pos:pos + 1].decode("utf-8", "replace")
            raise DiagramSyntaxError(f"unexpected character {bad!r}", SourceSpan(pos, pos + 1))
        if m.lastgroup != "ws":
            lexeme = m.group().decode("ascii")
            kind = "ident" if m.lastgroup == "ident" else lexeme
            out.append(Token(kind, lexeme, SourceSpan(m.start(), m.end())))
        pos = m.end()
    out.append(Token("eof", "", SourceSpan(len(data), len(data))))
    return out


class _Parser:
    def __init__(self, text: str, sig: Signature | None):
        self.tokens = tokenize(text)
        self.i = 0
        self.sig = sig

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
            raise DiagramSyntaxError(f"expected {kind!r}, found {found}", self.tok.span)
        return self.advance()

    def term(self) -> Term:
        left = self.par()
        while self.tok.kind == ";":
            self.advance()
            left = Seq(left, self.par())
        return left

    def par(self) -> Term:
        left = self.atom()
        while self.tok.kind == "*":
            self.advance()
            left = Par(left, self.atom())
        return left

    def word(self) -> ObjectType:
        names = []
        if self.tok.kind == "ident":
            names.append(self.advance().text)
            while self.tok.kind == ",":
                self.advance()
                names.append(self.expect("ident").text)
        return ObjectType(tuple(names))

    def atom(self) -> Term:
        t = self.tok
        if t.kind == "(":
            self.advance()
            inner = self.term()
            self.expect(")")
            return inner
        if t.kind != "ident":
            found = "end of input" if t.kind == "eof" else repr(t.text)
            raise DiagramSyntaxError(f"expected a term, found {found}", t.span)
        self.advance()
        if t.text in KEYWORDS:
            if self.tok.kind != "[":
                raise DiagramSyntaxError(f"keyword {t.text!r} must be followed by '['", t.span)
            self.advance()
            x = self.word()
            if t.text == "swap":
                self.expect("|")
                y = self.word()
                self.expect("]")
                return Swap(x, y)
            self.expect("]")
            return KEYWORDS[t.text](x)
        if self.sig is not None and t.text not in self.sig.generators:
            raise UnknownGenerator(t.text, t.span)
        return Gen(t.text)


def parse(text: str, sig: Signature | None = None) -> Term:
    """Parse ``text`` into a term.

    Generator names are checked against ``sig`` when one is given; the
    result is not typechecked.
    """
    p = _Parser(text, sig)
    out = p.term()
    if p.tok.kind != "eof":
        raise DiagramSyntaxError(f"unexpected {p.tok.text!r} after term", p.tok.span)
    return out


def _word(o: ObjectType) -> str:
    return ",".join(o.word)


def render(term: Term) -> str:
    """Canonical fully parenthesised text; ``parse(render(t)) == t``."""
    if isinstance(term, Gen):
        return term.name
    if isinstance(term, Seq):
        return f"({render(term.left)} ; {render(term.right)})"
    if isinstance(term, Par):
        return f"({render(term.left)} * {render(term.right)})"
    if isinstance(term, Swap):
        return f"swap[{_word(term.x)}|{_word(term.y)}]"
    for kw, cls in KEYWORDS.items():
        if type(term) is cls:
            return f"{kw}[{_word(term.obj)}]"
    raise TypeError(f"not a diagram term: {term!r}")
