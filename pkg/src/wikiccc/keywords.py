"""Token-contiguous keyword matching of titles against a language lexicon."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .atlas import LanguageAtlas
from .ids import id_key, sorted_ids

_TOKEN_RE = re.compile(r"[^\W_]+")


def tokenize(text: str) -> tuple[str, ...]:
    """Split on underscores, whitespace and punctuation; case-fold."""
    return tuple(_TOKEN_RE.findall(text.casefold()))


@dataclass(frozen=True)
class LexiconEntry:
    keyword: str
    owners: tuple[str, ...]
    is_language_name: bool = False


@dataclass(frozen=True)
class KeywordMatch:
    keyword: str
    qitem: str | None
    owners: tuple[str, ...]
    position: int
    is_language_name: bool


class Lexicon:
    """Keywords keyed by their token sequence, each with owning qitems."""

    def __init__(self, entries=()):
        self._entries: dict[tuple[str, ...], LexiconEntry] = {}
        for entry in entries:
            self.add(entry.keyword, entry.owners, entry.is_language_name)

    def add(self, keyword: str, owners=(), is_language_name: bool = False) -> None:
        tokens = tokenize(keyword)
        if not tokens:
            return
        prev = self._entries.get(tokens)
        if prev is not None:
            owners = set(owners) | set(prev.owners)
            is_language_name = is_language_name or prev.is_language_name
        self._entries[tokens] = LexiconEntry(" ".join(tokens), tuple(sorted_ids(set(owners))), is_language_name)

    @property
    def max_tokens(self) -> int:
        return max((len(t) for t in self._entries), default=0)

    def get(self, tokens: tuple[str, ...]) -> LexiconEntry | None:
        return self._entries.get(tokens)

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries.values())

    @classmethod
    def from_keywords(cls, keywords, owner: str | None = None) -> "Lexicon":
        lex = cls()
        for kw in keywords:
            lex.add(kw, (owner,) if owner else ())
        return lex


def build_lexicon(atlas: LanguageAtlas, language: str) -> Lexicon:
    """Territory keywords owned by their territory; language names by the language qitem."""
    lex = Lexicon()
    for territory in atlas.by_language[language]:
        for kw in territory.keywords:
            lex.add(kw, (territory.qitem,))
    info = atlas.language(language)
    for name in info.names:
        lex.add(name, (info.qitem,) if info.qitem else (), is_language_name=True)
    return lex


def match_title_keywords(title: str, lexicon: Lexicon) -> KeywordMatch | None:
    """Longest contiguous keyword match; ties go to the earliest position."""
    tokens = tokenize(title)
    longest = min(lexicon.max_tokens, len(tokens))
    for length in range(longest, 0, -1):
        for start in range(len(tokens) - length + 1):
            entry = lexicon.get(tokens[start : start + length])
            if entry is not None:
                owners = entry.owners
                return KeywordMatch(
                    keyword=entry.keyword,
                    qitem=min(owners, key=id_key) if owners else None,
                    owners=owners,
                    position=start,
                    is_language_name=entry.is_language_name,
                )
    return None
