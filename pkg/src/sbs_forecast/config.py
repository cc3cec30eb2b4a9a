"""JSON run configuration.

Minimal example (paths are relative to the config file)::

    {
      "event": {
        "voting_day": "2016-06-19",
        "analysis_start": "2016-06-06",
        "analysis_end": "2016-06-18",
        "tracked_brands": ["raggi", "giachetti"],
        "keywords": ["roma", "ballottaggio"],
        "results": {"raggi": 0.6715, "giachetti": 0.3285},
        "polls": "polls.csv"
      },
      "lexicon": "lexicon.json",
      "corpus": "corpus.jsonl"
    }

Everything else has a default: ``prep`` (stopwords file, stemmer_language
"italian", truncate_fraction 0.30, drop_numeric false), ``graph`` (window 7,
prune_min 2), ``fetch`` (endpoint, language, page_size), ``output_dir``
("out"), ``jobs`` (1), ``clamp`` (true).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigError
from .forecast import read_polls_csv
from .graph import GraphConfig
from .ingest import EventConfig
from .textprep import BrandLexicon, PrepConfig, load_stopwords

DEFAULT_ENDPOINT = "https://eventregistry.org/api/v1/article/getArticles"


@dataclass(frozen=True)
class FetchSettings:
    endpoint: str = DEFAULT_ENDPOINT
    language: str | None = None
    page_size: int = 100


@dataclass(frozen=True)
class RunConfig:
    event: EventConfig
    prep: PrepConfig
    graph: GraphConfig
    lexicon: BrandLexicon
    corpus_path: Path
    output_dir: Path
    lexicon_path: Path | None = None
    stopwords_path: Path | None = None
    polls_path: Path | None = None
    results: Mapping[str, float] | None = None
    fetch: FetchSettings = field(default_factory=FetchSettings)
    jobs: int = 1
    clamp: bool = True
    raw: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        unknown = set(self.event.tracked_brands) - self.lexicon.canonical_tokens
        if unknown:
            raise ConfigError(f"tracked brands not in the lexicon: {', '.join(sorted(unknown))}")

    def with_overrides(self, **kwargs) -> "RunConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    def provenance(self) -> dict:
        """Parameters that shape the results (no output location, no worker count)."""
        return {
            "event": {
                "voting_day": self.event.voting_day.isoformat(),
                "analysis_start": self.event.analysis_start.isoformat(),
                "analysis_end": self.event.analysis_end.isoformat(),
                "tracked_brands": list(self.event.tracked_brands),
                "keywords": list(self.event.keywords),
            },
            "prep": {
                "stemmer_language": self.prep.stemmer_language,
                "truncate_fraction": self.prep.truncate_fraction,
                "drop_numeric": self.prep.drop_numeric,
                "stopwords": self.raw.get("prep", {}).get("stopwords"),
                "n_stopwords": len(self.prep.stopwords),
            },
            "graph": {"window": self.graph.window, "prune_min": self.graph.prune_min},
            "lexicon": {k: list(v) for k, v in sorted(self.lexicon.entries.items())},
            "corpus": self.raw.get("corpus"),
            "polls": self.raw.get("event", {}).get("polls"),
            "results": dict(self.results) if self.results else None,
            "clamp": self.clamp,
            "week_definition": "ISO-8601",
        }


def _date(obj: Mapping, key: str) -> date:
    try:
        return date.fromisoformat(obj[key])
    except KeyError:
        raise ConfigError(f"event.{key} is required") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"event.{key}: {exc}") from None


def _existing(base: Path, value, what: str) -> Path:
    path = (base / value).resolve()
    if not path.exists():
        raise ConfigError(f"{what} not found: {path}")
    return path


def load_config(path, require_corpus: bool = False) -> RunConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return config_from_dict(data, path.parent, require_corpus=require_corpus)


def config_from_dict(data: Mapping, base: Path, require_corpus: bool = False) -> RunConfig:
    base = Path(base)
    ev = data.get("event")
    if not isinstance(ev, Mapping):
        raise ConfigError("config needs an 'event' object")

    polls_path = _existing(base, ev["polls"], "poll file") if ev.get("polls") else None
    polls = tuple(read_polls_csv(polls_path)) if polls_path else ()
    try:
        event = EventConfig(
            voting_day=_date(ev, "voting_day"),
            analysis_start=_date(ev, "analysis_start"),
            analysis_end=_date(ev, "analysis_end"),
            tracked_brands=tuple(ev.get("tracked_brands") or ()),
            keywords=tuple(ev.get("keywords") or ()),
            poll_records=polls,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None

    results = ev.get("results")
    if results is not None:
        if not isinstance(results, Mapping) or not all(isinstance(v, (int, float)) for v in results.values()):
            raise ConfigError("event.results must map option -> share")
        if any(not 0 <= v <= 1 for v in results.values()):
            raise ConfigError("event.results shares must be fractions in [0, 1]")

    prep_raw = dict(data.get("prep") or {})
    stopwords_path = None
    stopwords = frozenset()
    if prep_raw.get("stopwords"):
        stopwords_path = _existing(base, prep_raw["stopwords"], "stopword file")
        stopwords = load_stopwords(stopwords_path)
    try:
        prep = PrepConfig(
            stopwords=stopwords,
            stemmer_language=prep_raw.get("stemmer_language", "italian"),
            truncate_fraction=float(prep_raw.get("truncate_fraction", 0.30)),
            drop_numeric=bool(prep_raw.get("drop_numeric", False)),
        )
        graph_raw = data.get("graph") or {}
        graph = GraphConfig(window=graph_raw.get("window", 7), prune_min=graph_raw.get("prune_min", 2))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None

    if not data.get("lexicon"):
        raise ConfigError("config needs a 'lexicon' file")
    lexicon_path = _existing(base, data["lexicon"], "lexicon file")
    lexicon = BrandLexicon.load(lexicon_path)

    if not data.get("corpus"):
        raise ConfigError("config needs a 'corpus' path")
    corpus_path = (base / data["corpus"]).resolve()
    if require_corpus and not corpus_path.exists():
        raise ConfigError(f"corpus not found: {corpus_path}")

    fetch_raw = data.get("fetch") or {}
    fetch = FetchSettings(
        endpoint=fetch_raw.get("endpoint", DEFAULT_ENDPOINT),
        language=fetch_raw.get("language"),
        page_size=int(fetch_raw.get("page_size", 100)),
    )
    jobs = data.get("jobs", 1)
    if not isinstance(jobs, int) or jobs < 1:
        raise ConfigError("jobs must be an integer >= 1")
    return RunConfig(
        event=event,
        prep=prep,
        graph=graph,
        lexicon=lexicon,
        corpus_path=corpus_path,
        output_dir=(base / data.get("output_dir", "out")).resolve(),
        lexicon_path=lexicon_path,
        stopwords_path=stopwords_path,
        polls_path=polls_path,
        results=dict(results) if results is not None else None,
        fetch=fetch,
        jobs=jobs,
        clamp=bool(data.get("clamp", True)),
        raw=json.loads(json.dumps(data)),
    )
