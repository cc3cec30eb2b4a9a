"""Exception types raised across the package."""


class SbsError(Exception):
    """Base class for all package errors."""


class ConfigError(SbsError, ValueError):
    pass


class ArticleFormatError(SbsError, ValueError):
    """A JSONL line could not be turned into an article."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateArticleError(SbsError, ValueError):
    def __init__(self, article_id: str, line_no: int | None = None):
        where = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"duplicate article id {article_id!r}{where}")
        self.article_id = article_id
        self.line_no = line_no


class FetchError(SbsError):
    """Network or authentication failure talking to the news API.

    ``retriable`` is True for transport errors, 5xx and 429 responses.
    """

    def __init__(self, message: str, retriable: bool = True, status: int | None = None):
        super().__init__(message)
        self.retriable = retriable
        self.status = status


class MissingArcError(SbsError, KeyError):
    pass


class OracleLimitError(SbsError, ValueError):
    """The brute-force betweenness oracle refuses graphs above its node limit."""


class DegenerateWindowError(SbsError, ValueError):
    """A dimension has zero variance over the relevant set, so z-scores are undefined."""

    def __init__(self, dimension: str, week=None):
        where = f" in week {week.label}" if week is not None else ""
        super().__init__(f"degenerate window: {dimension} has zero variance{where}")
        self.dimension = dimension
        self.week = week


class NonPositiveScoreError(SbsError, ValueError):
    def __init__(self, offenders: dict):
        listing = ", ".join(f"{k}={v!r}" for k, v in sorted(offenders.items()))
        super().__init__(f"non-positive scores cannot be turned into shares: {listing}")
        self.offenders = dict(offenders)


class UndefinedApeError(SbsError, ZeroDivisionError):
    """APE is undefined when the actual value is zero."""


class EmptyDataError(SbsError):
    pass
