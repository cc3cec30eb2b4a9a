"""Article text -> token stream.

Stages run in a fixed order: alias unification, truncation to the leading
fraction of words, tokenization, stopword removal, stemming. Canonical brand
tokens pass through the last two stages untouched.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from nltk.stem.snowball import SnowballStemmer

from .errors import ConfigError
from .ingest import Article, WeekWindow

_TOKEN_RE = re.compile(r"\w+")
_CANONICAL_RE = re.compile(r"^\w+$")


class BrandLexicon:
    """Canonical brand tokens and the phrases that should be rewritten to them."""

    def __init__(self, entries: Mapping[str, Sequence[str]]):
        self.entries: dict[str, tuple[str, ...]] = {}
        owner: dict[str, str] = {}
        for canonical, phrases in entries.items():
            if not _CANONICAL_RE.match(canonical) or canonical != canonical.lower():
                raise ConfigError(f"canonical token must be lowercase without whitespace: {canonical!r}")
            if isinstance(phrases, str):
                phrases = [phrases]
            cleaned = []
            for phrase in phrases:
                words = phrase.split()
                if not words:
                    raise ConfigError(f"empty alias phrase for {canonical!r}")
                key = " ".join(words).casefold()
                if owner.get(key, canonical) != canonical:
                    raise ConfigError(f"alias {phrase!r} maps to both {owner[key]!r} and {canonical!r}")
                owner[key] = canonical
                cleaned.append(key)
            self.entries[canonical] = tuple(dict.fromkeys(cleaned))
        self._owner = owner
        self._pattern = self._compile()

    def _compile(self):
        if not self._owner:
            return None
        # longest phrase first so "virginia raggi" wins over "raggi"
        phrases = sorted(self._owner, key=lambda p: (-len(p), p))
        alts = "|".join(r"\s+".join(re.escape(w) for w in p.split()) for p in phrases)
        return re.compile(rf"(?<!\w)(?:{alts})(?!\w)", re.IGNORECASE)

    @property
    def canonical_tokens(self) -> frozenset[str]:
        return frozenset(self.entries)

    def canonical_for(self, phrase: str) -> str:
        return self._owner[" ".join(phrase.split()).casefold()]

    @classmethod
    def load(cls, path) -> "BrandLexicon":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: lexicon must be a JSON object")
        return cls(data)

    def __eq__(self, other):
        return isinstance(other, BrandLexicon) and self.entries == other.entries

    def __repr__(self):
        return f"BrandLexicon({self.entries!r})"


@dataclass(frozen=True)
class PrepConfig:
    stopwords: frozenset[str] = frozenset()
    stemmer_language: str = "italian"
    truncate_fraction: float = 0.30
    drop_numeric: bool = False

    def __post_init__(self):
        object.__setattr__(self, "stopwords", frozenset(w.lower() for w in self.stopwords))
        if not 0 < self.truncate_fraction <= 1:
            raise ConfigError(f"truncate_fraction must be in (0, 1], got {self.truncate_fraction}")
        if self.stemmer_language not in SnowballStemmer.languages:
            raise ConfigError(f"unsupported stemmer language {self.stemmer_language!r}")


@dataclass(frozen=True)
class TokenDoc:
    doc_id: str
    week: WeekWindow | None
    tokens: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))


def load_stopwords(path) -> frozenset[str]:
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip().lower()
        if line:
            words.add(line)
    return frozenset(words)


def normalize_aliases(text: str, lexicon: BrandLexicon) -> str:
    if lexicon._pattern is None or not text:
        return text
    return lexicon._pattern.sub(lambda m: lexicon.canonical_for(m.group(0)), text)


def truncate(title_text: str, body_text: str, fraction: float) -> str:
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    words = (title_text or "").split() + (body_text or "").split()
    # exact decimal arithmetic: 0.3 * 10 must give 3, not 3.0000000000000004
    keep = math.ceil(Fraction(str(fraction)) * len(words))
    return " ".join(words[:keep])


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def remove_stopwords(tokens: Iterable[str], stopwords, lexicon: BrandLexicon | None = None) -> list[str]:
    keep = lexicon.canonical_tokens if lexicon is not None else frozenset()
    return [t for t in tokens if t in keep or t not in stopwords]


@lru_cache(maxsize=None)
def _stemmer(language: str) -> SnowballStemmer:
    if language not in SnowballStemmer.languages:
        raise ConfigError(f"unsupported stemmer language {language!r}")
    return SnowballStemmer(language)


def stem(tokens: Iterable[str], language: str, lexicon: BrandLexicon | None = None) -> list[str]:
    stemmer = _stemmer(language)
    keep = lexicon.canonical_tokens if lexicon is not None else frozenset()
    return [t if t in keep else stemmer.stem(t) for t in tokens]


def preprocess(article: Article, week: WeekWindow | None, lexicon: BrandLexicon,
               prep_config: PrepConfig) -> TokenDoc:
    text = truncate(
        normalize_aliases(article.title, lexicon),
        normalize_aliases(article.body, lexicon),
        prep_config.truncate_fraction,
    )
    tokens = remove_stopwords(tokenize(text), prep_config.stopwords, lexicon)
    if prep_config.drop_numeric:
        tokens = [t for t in tokens if not t.isdigit()]
    tokens = stem(tokens, prep_config.stemmer_language, lexicon)
    return TokenDoc(article.id, week, tuple(t for t in tokens if t))
