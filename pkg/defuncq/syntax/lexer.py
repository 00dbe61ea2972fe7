from __future__ import annotations

import re
from dataclasses import dataclass

from ..utils.errors import ParseError

INT = "INT"
STRING = "STRING"
VAR = "VAR"
NAME = "NAME"
SYMBOL = "SYMBOL"
EOF = "EOF"

KEYWORDS = frozenset(
    {
        "and",
        "as",
        "case",
        "closure",
        "declare",
        "default",
        "div",
        "element",
        "else",
        "for",
        "function",
        "idiv",
        "if",
        "in",
        "let",
        "mod",
        "of",
        "or",
        "return",
        "then",
        "to",
        "typeswitch",
    }
)

# Longest symbols first
SYMBOLS = (
    ":=",
    "::",
    "=>",
    "!=",
    "<=",
    ">=",
    "(",
    ")",
    "{",
    "}",
    "[",
    "]",
    ",",
    ";",
    "#",
    "/",
    ".",
    "=",
    "<",
    ">",
    "+",
    "-",
    "*",
)

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*")
_PREFIXED_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*:(?=[A-Za-z_])")
_INT = re.compile(r"[0-9]+")
_SPACE = re.compile(r"[ \t\r\n]+")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int

    def is_symbol(self, text):
        return self.kind == SYMBOL and self.text == text

    def is_word(self, text):
        return self.kind == NAME and self.text == text

    def describe(self):
        if self.kind == EOF:
            return "end of input"
        return repr(self.text)


class Lexer:
    """Splits program text into tokens, dropping whitespace and comments."""

    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.line = 1
        self.column = 1

    def tokens(self):
        result = []
        while True:
            self._skip_trivia()
            if self.pos >= len(self.text):
                result.append(Token(EOF, "", self.line, self.column))
                return result
            result.append(self._next())

    def _advance(self, count):
        chunk = self.text[self.pos : self.pos + count]
        newlines = chunk.count("\n")
        if newlines:
            self.line += newlines
            self.column = len(chunk) - chunk.rfind("\n")
        else:
            self.column += count
        self.pos += count
        return chunk

    def _error(self, message, expected=()):
        raise ParseError(message, self.line, self.column, expected)

    def _skip_trivia(self):
        while self.pos < len(self.text):
            space = _SPACE.match(self.text, self.pos)
            if space:
                self._advance(space.end() - self.pos)
            elif self.text.startswith("--", self.pos):
                end = self.text.find("\n", self.pos)
                self._advance((len(self.text) if end < 0 else end) - self.pos)
            elif self.text.startswith("(:", self.pos):
                self._skip_block_comment()
            else:
                return

    def _skip_block_comment(self):
        depth = 0
        while self.pos < len(self.text):
            if self.text.startswith("(:", self.pos):
                depth += 1
                self._advance(2)
            elif self.text.startswith(":)", self.pos):
                depth -= 1
                self._advance(2)
                if depth == 0:
                    return
            else:
                self._advance(1)
        self._error("unterminated comment", [":)"])

    def _name(self):
        # Namespace prefixes are dropped: math:pow is pow
        prefix = _PREFIXED_NAME.match(self.text, self.pos)
        if prefix:
            self._advance(prefix.end() - self.pos)
        match = _NAME.match(self.text, self.pos)
        return self._advance(match.end() - self.pos)

    def _next(self):
        line, column = self.line, self.column
        char = self.text[self.pos]
        if char == "$":
            self._advance(1)
            if not _NAME.match(self.text, self.pos):
                self._error("variable name expected after '$'", ["name"])
            return Token(VAR, self._name(), line, column)
        if _NAME.match(self.text, self.pos):
            return Token(NAME, self._name(), line, column)
        number = _INT.match(self.text, self.pos)
        if number:
            return Token(INT, self._advance(number.end() - self.pos), line, column)
        if char in "\"'":
            return Token(STRING, self._string(char), line, column)
        for symbol in SYMBOLS:
            if self.text.startswith(symbol, self.pos):
                return Token(SYMBOL, self._advance(len(symbol)), line, column)
        self._error(f"unexpected character {char!r}")

    def _string(self, quote):
        self._advance(1)
        chunks = []
        while True:
            end = self.text.find(quote, self.pos)
            if end < 0:
                self._error("unterminated string literal", [quote])
            chunks.append(self._advance(end - self.pos))
            self._advance(1)
            # A doubled quote stands for one quote character
            if self.text.startswith(quote, self.pos):
                chunks.append(self._advance(1))
                continue
            return "".join(chunks)


def tokenize(text):
    return Lexer(text).tokens()
