"""A small tokenizer shared by the net, marking and automaton file formats."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "int", or the punctuation itself
    text: str
    line: int


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*|//[^\n]*)
  | (?P<arrow>->)
  | (?P<int>-?\d+)
  | (?P<name>[^\W\d][\w']*)
  | (?P<punct>[;{}:,\[\]])
""", re.VERBOSE | re.UNICODE)


def tokenize(text: str) -> List[Token]:
    out = []
    line = 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
        elif kind in ("name", "int"):
            out.append(Token(kind, m.group(), line))
        elif kind in ("punct", "arrow"):
            out.append(Token(m.group(), m.group(), line))
        pos = m.end()
    return out


class Cursor:
    """Recursive-descent helper over a token list."""

    def __init__(self, text: str) -> None:
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    @property
    def line(self) -> Optional[int]:
        tok = self.peek()
        if tok is not None:
            return tok.line
        return self.tokens[-1].line if self.tokens else 1

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def next(self, what: str = "a token") -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"expected {what}, found end of input", self.line)
        self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.next(repr(kind))
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text!r}", tok.line)
        return tok

    def accept(self, kind: str, text: Optional[str] = None) -> Optional[Token]:
        tok = self.peek()
        if tok is not None and tok.kind == kind and (text is None or tok.text == text):
            self.pos += 1
            return tok
        return None

    def keyword(self, word: str) -> Token:
        tok = self.next(repr(word))
        if tok.kind != "name" or tok.text != word:
            raise ParseError(f"expected {word!r}, found {tok.text!r}", tok.line)
        return tok

    def names_until(self, stop: str) -> List[Token]:
        out = []
        while True:
            tok = self.next(f"a name or {stop!r}")
            if tok.kind == stop:
                return out
            if tok.kind != "name":
                raise ParseError(f"expected a name, found {tok.text!r}", tok.line)
            out.append(tok)

    def integer(self) -> int:
        tok = self.next("an integer")
        if tok.kind != "int":
            raise ParseError(f"expected an integer, found {tok.text!r}", tok.line)
        return int(tok.text)
