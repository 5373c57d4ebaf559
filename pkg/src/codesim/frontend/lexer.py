"""Tokenizer for the C subset (see docs/c-subset.md)."""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from ..errors import ParseError

KEYWORDS = {
    "void", "char", "short", "int", "long", "float", "double", "signed",
    "unsigned", "struct", "union", "enum", "const", "volatile", "static",
    "extern", "inline", "register", "if", "else", "while", "do", "for",
    "switch", "case", "default", "return", "break", "continue", "sizeof",
    "goto", "typedef",
}

# Longest-match first.
PUNCTUATORS = [
    "<<=", ">>=",
    "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "(", ")", "[", "]", "{", "}", ";", ",", ".", "?", ":",
    "+", "-", "*", "/", "%", "<", ">", "=", "!", "~", "&", "|", "^",
]

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_DIGITS = set("0123456789")


@dataclass
class Token:
    kind: str  # ident | keyword | int | float | char | string | punct | eof
    text: str
    pos: int
    line: int


@dataclass
class Comment:
    text: str  # inner text, delimiters stripped
    start: int
    end: int


class Lexer:
    def __init__(self, text: str, path: str = "<input>"):
        self.text = text
        self.path = path
        self._line_starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                self._line_starts.append(i + 1)

    def line_of(self, pos: int) -> int:
        return bisect.bisect_right(self._line_starts, pos)

    def error(self, pos: int, message: str) -> ParseError:
        return ParseError(self.path, self.line_of(pos), message)

    def tokenize(self) -> tuple[list[Token], list[Comment]]:
        text, n = self.text, len(self.text)
        tokens: list[Token] = []
        comments: list[Comment] = []
        i = 0
        at_line_start = True
        while i < n:
            ch = text[i]
            if ch in " \t\r\v\f":
                i += 1
                continue
            if ch == "\n":
                i += 1
                at_line_start = True
                continue
            if ch == "#" and at_line_start:
                # Preprocessor directive: skip to end of line, honoring \ splices.
                while i < n and text[i] != "\n":
                    if text[i] == "\\" and i + 1 < n and text[i + 1] == "\n":
                        i += 1
                    i += 1
                continue
            at_line_start = False
            if ch == "/" and i + 1 < n and text[i + 1] == "/":
                j = text.find("\n", i)
                j = n if j < 0 else j
                comments.append(Comment(text[i + 2:j], i, j))
                i = j
                continue
            if ch == "/" and i + 1 < n and text[i + 1] == "*":
                j = text.find("*/", i + 2)
                if j < 0:
                    raise self.error(i, "unterminated block comment")
                comments.append(Comment(text[i + 2:j], i, j + 2))
                i = j + 2
                continue
            if ch in _IDENT_START:
                j = i + 1
                while j < n and (text[j] in _IDENT_START or text[j] in _DIGITS):
                    j += 1
                word = text[i:j]
                kind = "keyword" if word in KEYWORDS else "ident"
                tokens.append(Token(kind, word, i, self.line_of(i)))
                i = j
                continue
            if ch in _DIGITS or (ch == "." and i + 1 < n and text[i + 1] in _DIGITS):
                i = self._scan_number(tokens, i)
                continue
            if ch == "'":
                i = self._scan_char(tokens, i)
                continue
            if ch == '"':
                i = self._scan_string(tokens, i)
                continue
            for p in PUNCTUATORS:
                if text.startswith(p, i):
                    tokens.append(Token("punct", p, i, self.line_of(i)))
                    i += len(p)
                    break
            else:
                raise self.error(i, f"unexpected character {ch!r}")
        tokens.append(Token("eof", "", n, self.line_of(n)))
        return tokens, comments

    def _scan_number(self, tokens: list[Token], i: int) -> int:
        text, n = self.text, len(self.text)
        j = i
        is_float = False
        if text.startswith(("0x", "0X"), i):
            j = i + 2
            while j < n and text[j] in "0123456789abcdefABCDEF":
                j += 1
        else:
            while j < n and text[j] in _DIGITS:
                j += 1
            if j < n and text[j] == ".":
                is_float = True
                j += 1
                while j < n and text[j] in _DIGITS:
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k] in _DIGITS:
                    is_float = True
                    j = k
                    while j < n and text[j] in _DIGITS:
                        j += 1
        while j < n and text[j] in "uUlLfF":
            if text[j] in "fF":
                is_float = True
            j += 1
        tokens.append(Token("float" if is_float else "int", text[i:j], i, self.line_of(i)))
        return j

    def _scan_quoted(self, tokens: list[Token], i: int, quote: str, kind: str, what: str) -> int:
        text, n = self.text, len(self.text)
        j = i + 1
        while j < n:
            c = text[j]
            if c == quote:
                tokens.append(Token(kind, text[i:j + 1], i, self.line_of(i)))
                return j + 1
            if c == "\n":
                break
            j += 2 if c == "\\" else 1
        raise self.error(i, f"unterminated {what}")

    def _scan_char(self, tokens: list[Token], i: int) -> int:
        return self._scan_quoted(tokens, i, "'", "char", "character constant")

    def _scan_string(self, tokens: list[Token], i: int) -> int:
        return self._scan_quoted(tokens, i, '"', "string", "string literal")
