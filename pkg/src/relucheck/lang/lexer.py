"""Tokenizer for property files."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class SpecSyntaxError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"line {line}, col {col}: {message}"
        super().__init__(message)


KEYWORDS = frozenset(
    {"nuv", "spec", "pre", "post", "argmax", "dist_inf", "true", "false"}
)

# longest match first
_SYMBOLS = (
    ":=",
    "==",
    "!=",
    "<=",
    ">=",
    "&&",
    "||",
    "->",
    "<",
    ">",
    "!",
    "=",
    "{",
    "}",
    "(",
    ")",
    "[",
    "]",
    ",",
    ";",
    "+",
    "-",
    "*",
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "num", "string", "eof", or the symbol itself
    text: str
    line: int
    col: int
    value: object = None  # Fraction for num tokens, str payload for strings


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            advance(1)
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                advance(1)
            continue
        if c == '"':
            start_line, start_col = line, col
            j = i + 1
            while j < n and text[j] not in '"\n':
                j += 1
            if j >= n or text[j] != '"':
                raise SpecSyntaxError("unterminated string", start_line, start_col)
            payload = text[i + 1 : j]
            toks.append(Token("string", text[i : j + 1], start_line, start_col, payload))
            advance(j + 1 - i)
            continue
        if c.isdigit():
            start_line, start_col = line, col
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            elif j < n and text[j] == "/" and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            lit = text[i:j]
            toks.append(Token("num", lit, start_line, start_col, Fraction(lit)))
            advance(j - i)
            continue
        if c.isalpha() or c == "_":
            start_line, start_col = line, col
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = word if word in KEYWORDS else "ident"
            toks.append(Token(kind, word, start_line, start_col))
            advance(j - i)
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Token(sym, sym, line, col))
                advance(len(sym))
                break
        else:
            raise SpecSyntaxError(f"unexpected character {c!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks
