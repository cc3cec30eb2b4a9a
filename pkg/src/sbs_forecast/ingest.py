"""Article ingestion: JSONL corpora, the news-API client, period filtering and weekly buckets."""

from __future__ import annotations

import json
import logging
import os
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import requests

from .errors import ArticleFormatError, ConfigError, DuplicateArticleError, FetchError

LOGGER = logging.getLogger(__name__)

API_KEY_ENV = "SBS_NEWS_API_KEY"


@dataclass(frozen=True)
class Article:
    id: str
    published: date
    title: str
    body: str
    source: str | None = None
    language: str | None = None

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ValueError("article id must be a non-empty string")
        if not isinstance(self.published, date) or isinstance(self.published, datetime):
            raise ValueError(f"article {self.id}: published must be a date")
        if not (self.title or "").strip() and not (self.body or "").strip():
            raise ValueError(f"article {self.id}: title and body are both empty")

    def to_json(self) -> dict:
        obj = {
            "id": self.id,
            "published": self.published.isoformat(),
            "title": self.title,
            "body": self.body,
        }
        if self.source is not None:
            obj["source"] = self.source
        if self.language is not None:
            obj["language"] = self.language
        return obj


@dataclass(frozen=True)
class PollRecord:
    """One published poll: option -> share (fractions)."""

    published: date
    shares: Mapping[str, float]
    pollster: str = ""


@dataclass(frozen=True)
class EventConfig:
    voting_day: date
    analysis_start: date
    analysis_end: date
    tracked_brands: tuple[str, ...]
    keywords: tuple[str, ...] = ()
    poll_records: tuple[PollRecord, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tracked_brands", tuple(self.tracked_brands))
        object.__setattr__(self, "keywords", tuple(self.keywords))
        object.__setattr__(self, "poll_records", tuple(self.poll_records))
        if not self.tracked_brands:
            raise ConfigError("tracked_brands must not be empty")
        if len(set(self.tracked_brands)) != len(self.tracked_brands):
            raise ConfigError("tracked_brands contains duplicates")
        if not self.analysis_start < self.analysis_end:
            raise ConfigError("analysis_start must be before analysis_end")
        if not self.analysis_end < self.voting_day:
            raise ConfigError("analysis_end must be at latest the day before voting_day")

    @property
    def voting_week(self) -> tuple[int, int]:
        iso = self.voting_day.isocalendar()
        return iso[0], iso[1]


@dataclass(frozen=True, order=True)
class WeekWindow:
    """An ISO-8601 week, with its distance in whole weeks from the voting week."""

    iso_year: int
    iso_week: int
    lag: int = field(compare=False)

    def __post_init__(self):
        if not 1 <= self.iso_week <= 53:
            raise ValueError(f"iso_week out of range: {self.iso_week}")
        if self.lag < 0:
            raise ValueError(f"negative lag: {self.lag}")

    @property
    def label(self) -> str:
        return f"{self.iso_year}-W{self.iso_week:02d}"

    @property
    def monday(self) -> date:
        return date.fromisocalendar(self.iso_year, self.iso_week, 1)

    @classmethod
    def containing(cls, day: date, voting_day: date) -> "WeekWindow":
        iso = day.isocalendar()
        monday = day - timedelta(days=day.weekday())
        vote_monday = voting_day - timedelta(days=voting_day.weekday())
        return cls(iso[0], iso[1], (vote_monday - monday).days // 7)

    @classmethod
    def parse(cls, label: str, voting_day: date) -> "WeekWindow":
        try:
            year, week = label.split("-W")
            return cls.containing(date.fromisocalendar(int(year), int(week), 1), voting_day)
        except ValueError as exc:
            raise ValueError(f"bad ISO week label {label!r}") from exc


def _parse_date(value, what="published") -> date:
    if isinstance(value, date) and not isinstance(value, datetime):
        return value
    if not isinstance(value, str):
        raise ValueError(f"{what} must be an ISO date string")
    # tolerate full timestamps; only the calendar day is used
    return date.fromisoformat(value[:10])


def article_from_json(obj: Mapping) -> Article:
    if not isinstance(obj, Mapping):
        raise ValueError("expected a JSON object")
    missing = [k for k in ("id", "published") if k not in obj]
    if missing:
        raise ValueError(f"missing field(s): {', '.join(missing)}")
    return Article(
        id=obj["id"],
        published=_parse_date(obj["published"]),
        title=obj.get("title") or "",
        body=obj.get("body") or "",
        source=obj.get("source"),
        language=obj.get("language"),
    )


def read_jsonl(path) -> list[Article]:
    articles = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                article = article_from_json(json.loads(line))
            except (ValueError, TypeError) as exc:
                raise ArticleFormatError(line_no, str(exc)) from exc
            if article.id in seen:
                raise DuplicateArticleError(article.id, line_no)
            seen.add(article.id)
            articles.append(article)
    return articles


def write_jsonl(articles: Iterable[Article], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for article in articles:
            fh.write(json.dumps(article.to_json(), ensure_ascii=False, sort_keys=False))
            fh.write("\n")


def _matches_any(article: Article, keywords: Sequence[str]) -> bool:
    text = f"{article.title}\n{article.body}".casefold()
    return any(k.casefold() in text for k in keywords)


def _from_api_record(rec: Mapping) -> Article:
    """Accept both the Event Registry article shape and our own JSONL shape."""
    if "uri" in rec and "id" not in rec:
        source = rec.get("source")
        if isinstance(source, Mapping):
            source = source.get("uri") or source.get("title")
        return Article(
            id=str(rec["uri"]),
            published=_parse_date(rec.get("date") or rec.get("dateTime")),
            title=rec.get("title") or "",
            body=rec.get("body") or "",
            source=source,
            language=rec.get("lang"),
        )
    return article_from_json(rec)


def fetch_news(
    endpoint: str,
    query_keywords: Sequence[str],
    date_range: tuple[date, date],
    api_key: str | None = None,
    *,
    cache_path=None,
    language: str | None = None,
    page_size: int = 100,
    max_pages: int = 1000,
    timeout: float = 30.0,
    session: requests.Session | None = None,
) -> list[Article]:
    """Query an Event Registry-style article endpoint, OR-ing the keywords.

    ``date_range`` is inclusive on both ends. Results are deduplicated by id,
    sorted by id, and written to ``cache_path`` as JSONL when given.
    """
    if not endpoint.startswith(("http://", "https://")):
        raise ConfigError(f"endpoint must be an http(s) URL: {endpoint!r}")
    keywords = [k for k in query_keywords if k and k.strip()]
    if not keywords:
        raise ConfigError("at least one query keyword is required")
    start, end = date_range
    if end < start:
        articles: list[Article] = []
    else:
        if api_key is None:
            api_key = os.environ.get(API_KEY_ENV)
        articles = _fetch_pages(
            session or requests.Session(), endpoint, keywords, start, end, api_key,
            language, page_size, max_pages, timeout,
        )
    if cache_path is not None:
        write_jsonl(articles, cache_path)
    return articles


def _fetch_pages(session, endpoint, keywords, start, end, api_key, language, page_size,
                 max_pages, timeout) -> list[Article]:
    by_id: dict[str, Article] = {}
    page = 1
    pages = 1
    while page <= pages and page <= max_pages:
        query = {
            "action": "getArticles",
            "keyword": list(keywords),
            "keywordOper": "or",
            "dateStart": start.isoformat(),
            "dateEnd": end.isoformat(),
            "dataType": ["news"],
            "resultType": "articles",
            "articlesPage": page,
            "articlesCount": page_size,
            "articlesSortBy": "date",
        }
        if language:
            query["lang"] = language
        if api_key:
            query["apiKey"] = api_key
        try:
            resp = session.post(endpoint, json=query, timeout=timeout)
        except requests.RequestException as exc:
            raise FetchError(f"request to {endpoint} failed: {exc}", retriable=True) from exc
        if resp.status_code in (401, 403):
            raise FetchError(f"authentication rejected ({resp.status_code})",
                             retriable=False, status=resp.status_code)
        if resp.status_code >= 400:
            raise FetchError(f"news API returned HTTP {resp.status_code}",
                             retriable=resp.status_code >= 500 or resp.status_code == 429,
                             status=resp.status_code)
        try:
            payload = resp.json()
        except ValueError as exc:
            raise FetchError("news API returned a non-JSON body", retriable=True) from exc
        if isinstance(payload, Mapping) and "error" in payload:
            raise FetchError(f"news API error: {payload['error']}", retriable=False)
        block = payload.get("articles", {}) if isinstance(payload, Mapping) else {}
        results = block.get("results", []) if isinstance(block, Mapping) else block
        for rec in results:
            try:
                article = _from_api_record(rec)
            except (ValueError, TypeError, KeyError) as exc:
                LOGGER.warning("skipping malformed API record: %s", exc)
                continue
            if not start <= article.published <= end:
                continue
            if not _matches_any(article, keywords):
                continue
            by_id.setdefault(article.id, article)
        pages = int(block.get("pages", 1)) if isinstance(block, Mapping) else 1
        page += 1
    return [by_id[k] for k in sorted(by_id)]


def filter_period(articles: Iterable[Article], config: EventConfig) -> list[Article]:
    return [
        a for a in articles
        if config.analysis_start <= a.published <= config.analysis_end
        and a.published != config.voting_day
    ]


def group_by_week(articles: Iterable[Article], config: EventConfig) -> dict[WeekWindow, list[Article]]:
    buckets: dict[WeekWindow, list[Article]] = defaultdict(list)
    for article in articles:
        buckets[WeekWindow.containing(article.published, config.voting_day)].append(article)
    return dict(sorted(buckets.items()))


def analysis_weeks(config: EventConfig) -> list[WeekWindow]:
    """Every ISO week touched by the analysis period, oldest first."""
    weeks = []
    day = config.analysis_start - timedelta(days=config.analysis_start.weekday())
    while day <= config.analysis_end:
        weeks.append(WeekWindow.containing(day, config.voting_day))
        day += timedelta(days=7)
    return weeks
