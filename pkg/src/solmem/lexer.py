"""Tokenizer for the supported Solidity fragment."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError

KEYWORDS = {
    "contract",
    "struct",
    "constructor",
    "function",
    "returns",
    "mapping",
    "storage",
    "memory",
    "delete",
    "new",
    "assert",
    "true",
    "false",
    "int",
    "uint",
    "bool",
    "address",
    "pragma",
}

# Solidity keywords outside the fragment; reported as unsupported rather
# than parsed as identifiers, so nothing is silently misread.
UNSUPPORTED_KEYWORDS = {
    "if": "if statement",
    "else": "if statement",
    "for": "loops",
    "while": "loops",
    "do": "loops",
    "return": "return statement",
    "require": "require",
    "revert": "revert",
    "emit": "events",
    "event": "events",
    "enum": "enums",
    "modifier": "modifiers",
    "library": "libraries",
    "interface": "interfaces",
    "import": "imports",
    "using": "using-for",
    "is": "inheritance",
    "calldata": "calldata location",
    "assembly": "inline assembly",
    "bytes": "bytes type",
    "string": "string type",
    "this": "contract self-reference",
}

# Function header modifiers tolerated (skipped with a warning).
IGNORED_MODIFIERS = {"public", "private", "internal", "external", "pure", "view", "payable"}

SYMBOLS = [
    "=>",
    "==",
    "!=",
    "<=",
    ">=",
    "&&",
    "||",
    "(",
    ")",
    "[",
    "]",
    "{",
    "}",
    ";",
    ",",
    ".",
    "?",
    ":",
    "=",
    "<",
    ">",
    "!",
    "+",
    "-",
    "*",
    "/",
    "%",
]


@dataclass
class Token:
    kind: str  # "ident" | "number" | "keyword" | "symbol" | "eof"
    value: str
    line: int
    col: int

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.value!r}, {self.line}:{self.col})"


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def advance(count: int) -> None:
        nonlocal i, line, col
        for _ in range(count):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c.isspace():
            advance(1)
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                advance(1)
            continue
        if text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end < 0:
                raise ParseError("unterminated block comment", line, col)
            advance(end + 2 - i)
            continue
        if c.isdigit():
            start, sline, scol = i, line, col
            while i < n and text[i].isdigit():
                advance(1)
            if i < n and (text[i].isalpha() or text[i] == "_"):
                raise ParseError("malformed number", sline, scol)
            tokens.append(Token("number", text[start:i], sline, scol))
            continue
        if c.isalpha() or c == "_":
            start, sline, scol = i, line, col
            while i < n and (text[i].isalnum() or text[i] == "_"):
                advance(1)
            word = text[start:i]
            kind = "keyword" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, sline, scol))
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("symbol", sym, line, col))
                advance(len(sym))
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens
