"""Natural-language term processing for identifiers and comments.

The pipeline: split tokens on non-alpha characters, underscores, and
CamelCase; greedily re-split joined words against a dictionary; lowercase;
drop stop words (English + code) and single characters; stem.
"""

from __future__ import annotations

import re
from collections import Counter
from importlib import resources
from typing import Iterable

from .stemmer import stem

_ALPHA_RE = re.compile(r"[A-Za-z]+")
_CAMEL_RE = re.compile(r"[A-Z]+(?![a-z])|[A-Z][a-z]*|[a-z]+")


def _load_words(resource: str) -> frozenset[str]:
    text = resources.files("codesim").joinpath("data", resource).read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def default_dictionary() -> frozenset[str]:
    return _load_words("dictionary.txt")


def default_stop_words() -> frozenset[str]:
    return _load_words("stopwords_english.txt") | _load_words("stopwords_code.txt")


def split_identifier(token: str) -> list[str]:
    """'binSearch' -> ['bin', 'Search']; underscores and digits separate parts."""
    parts = []
    for run in _ALPHA_RE.findall(token):
        parts.extend(_CAMEL_RE.findall(run))
    return parts


def greedy_dictionary_split(word: str, dictionary: frozenset[str], min_piece: int = 2) -> list[str]:
    """Split a joined lowercase word by repeated longest dictionary prefix.

    Returns [word] unchanged when the word is already in the dictionary or
    cannot be fully covered by dictionary words.
    """
    if word in dictionary:
        return [word]
    pieces = []
    rest = word
    while rest:
        for end in range(len(rest), min_piece - 1, -1):
            if rest[:end] in dictionary:
                pieces.append(rest[:end])
                rest = rest[end:]
                break
        else:
            return [word]
    return pieces


class NlPipeline:
    """Shared configuration for NL term extraction (dictionary + stop lists)."""

    def __init__(self, dictionary: frozenset[str] | None = None,
                 stop_words: frozenset[str] | None = None):
        self.dictionary = default_dictionary() if dictionary is None else frozenset(dictionary)
        self.stop_words = default_stop_words() if stop_words is None else frozenset(stop_words)

    def terms(self, text: str) -> list[str]:
        """Processed terms for one raw token or comment string."""
        out = []
        for part in split_identifier(text):
            for piece in greedy_dictionary_split(part.lower(), self.dictionary):
                if len(piece) <= 1 or piece in self.stop_words:
                    continue
                stemmed = stem(piece)
                if len(stemmed) <= 1 or stemmed in self.stop_words:
                    continue
                out.append(stemmed)
        return out

    def process(self, raw_terms: Iterable[tuple[str, str]]) -> Counter:
        """Term multiset for (text, origin) sources; origins are ignored here."""
        counter: Counter = Counter()
        for text, _origin in raw_terms:
            counter.update(self.terms(text))
        return counter

    def process_with_origins(self, raw_terms: Iterable[tuple[str, str]]) -> tuple[Counter, set[str]]:
        """Term multiset plus the set of terms that came from the function name."""
        counter: Counter = Counter()
        name_terms: set[str] = set()
        for text, origin in raw_terms:
            terms = self.terms(text)
            counter.update(terms)
            if origin == "name":
                name_terms.update(terms)
        return counter, name_terms


def nl_pipeline(raw_terms: Iterable[tuple[str, str]],
                pipeline: NlPipeline | None = None) -> Counter:
    """Convenience wrapper: process sources with the default configuration."""
    return (pipeline or _default_pipeline()).process(raw_terms)


_DEFAULT: NlPipeline | None = None


def _default_pipeline() -> NlPipeline:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = NlPipeline()
    return _DEFAULT


def comment_words(comments: Iterable[str]) -> frozenset[str]:
    """Lowercased alphabetic words of a function's comments, unfiltered."""
    words = set()
    for comment in comments:
        words.update(w.lower() for w in _ALPHA_RE.findall(comment))
    return frozenset(words)
