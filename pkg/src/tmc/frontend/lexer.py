"""Tokenizer shared by the TM and ER grammars."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Sequence

from tmc.errors import SYNTAX, Diagnostic, Location, ParseError

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>[0-9]+(?:\.[0-9]+)?)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<arrow>->)
  | (?P<punct>[{}();.,])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str  # ident | number | string | punct | eof
    text: str
    line: int
    column: int

    @property
    def loc(self) -> Location:
        return (self.line, self.column)

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def _unescape(body: str, tok_loc: Location) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            nxt = body[i + 1]
            if nxt not in _ESCAPES:
                raise ParseError([Diagnostic.error(SYNTAX, f"unknown escape \\{nxt} in string", tok_loc)])
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def tokenize(text: str) -> List[Token]:
    text = text.replace("\r\n", "\n")
    tokens: List[Token] = []
    pos = 0
    line, col = 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            ch = text[pos]
            if ch == '"':
                msg = "unterminated string"
            else:
                msg = f"unexpected character {ch!r}"
            raise ParseError([Diagnostic.error(SYNTAX, msg, (line, col))])
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "string":
            tokens.append(Token("string", _unescape(lexeme[1:-1], (line, col)), line, col))
        elif kind in ("ident", "number"):
            tokens.append(Token(kind, lexeme, line, col))
        elif kind in ("arrow", "punct"):
            tokens.append(Token("punct", lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class TokenStream:
    """Cursor over tokens with the usual expect/accept helpers."""

    def __init__(self, text: str, reserved: Sequence[str] = ()):
        self.tokens = tokenize(text)
        self.pos = 0
        self.reserved = frozenset(reserved)

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.current
        return ParseError([Diagnostic.error(SYNTAX, message, tok.loc)])

    def at(self, text: str) -> bool:
        tok = self.current
        return tok.kind in ("ident", "punct") and tok.text == text

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.fail(f"expected {text!r}, found {self.current.describe()}")
        return self.advance()

    def expect_ident(self, what: str = "identifier") -> Token:
        tok = self.current
        if tok.kind != "ident":
            raise self.fail(f"expected {what}, found {tok.describe()}")
        if tok.text in self.reserved:
            raise self.fail(f"{tok.text!r} is a keyword and cannot be used as {what}")
        return self.advance()

    def expect_one_of(self, options: Sequence[str], what: str) -> Token:
        tok = self.current
        if tok.kind != "ident" or tok.text not in options:
            raise self.fail(f"expected {what} ({' | '.join(options)}), found {tok.describe()}")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        tok = self.current
        if tok.kind != kind:
            raise self.fail(f"expected {what}, found {tok.describe()}")
        return self.advance()
