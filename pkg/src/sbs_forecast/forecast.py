"""Vote-share forecasts from relative scores, and their evaluation against results.

All shares are fractions in [0, 1]; conversion to percent happens in reports.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, EmptyDataError, NonPositiveScoreError, UndefinedApeError
from .ingest import PollRecord, WeekWindow

LOGGER = logging.getLogger(__name__)

BASES = ("sbs", "prevalence", "diversity", "connectivity", "poll_average")
CLAMP_FLOOR = 0.01


@dataclass(frozen=True)
class ForecastShare:
    shares: Mapping[str, float]
    basis: str
    week: WeekWindow | None = None
    clamped: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "shares", dict(sorted(self.shares.items())))


@dataclass(frozen=True)
class ElectionOutcome:
    official: Mapping[str, float]
    adjusted: Mapping[str, float]


@dataclass(frozen=True)
class OptionError:
    option: str
    actual: float
    adjusted_actual: float
    forecast: float
    abs_error_pp: float
    ape: float
    real_rank: int
    forecast_rank: int


@dataclass(frozen=True)
class EvalReport:
    basis: str
    week: WeekWindow | None
    rows: tuple[OptionError, ...]
    mape: float
    mae_pp: float
    n_misranked: int
    params: Mapping = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "basis": self.basis,
            "week_iso": self.week.label if self.week else None,
            "lag": self.week.lag if self.week else None,
            "mape": self.mape,
            "mae_pp": self.mae_pp,
            "n_misranked": self.n_misranked,
            "options": [r.__dict__ for r in self.rows],
            "params": dict(self.params),
        }


def forecast_shares(scores: Mapping[str, float], basis: str = "sbs", week: WeekWindow | None = None,
                    clamp: bool = True, floor: float = CLAMP_FLOOR) -> ForecastShare:
    """share_i = score_i / sum(scores).

    Standardized scores can be zero or negative. With ``clamp`` they are raised
    to ``floor`` (and logged); without it they are an error.
    """
    if not scores:
        raise EmptyDataError("no scores to turn into shares")
    values = {k: float(v) for k, v in scores.items()}
    offenders = {k: v for k, v in values.items() if not v > 0}
    clamped: tuple[str, ...] = ()
    if offenders:
        if not clamp:
            raise NonPositiveScoreError(offenders)
        LOGGER.warning("clamping non-positive %s scores to %s: %s", basis, floor,
                       ", ".join(f"{k}={v:.4g}" for k, v in sorted(offenders.items())))
        for k in offenders:
            values[k] = floor
        clamped = tuple(sorted(offenders))
    total = math.fsum(values.values())
    return ForecastShare({k: v / total for k, v in values.items()}, basis, week, clamped)


def adjust_actuals(official: Mapping[str, float], tracked: Iterable[str]) -> ElectionOutcome:
    tracked = list(tracked)
    missing = [t for t in tracked if t not in official]
    if missing:
        raise ConfigError(f"tracked option(s) missing from official results: {', '.join(missing)}")
    total = math.fsum(official[t] for t in tracked)
    if not total > 0:
        raise ConfigError("official shares of the tracked options sum to zero")
    return ElectionOutcome(
        {t: official[t] for t in tracked},
        {t: official[t] / total for t in tracked},
    )


def ape(y: float, y_hat: float) -> float:
    if y == 0:
        raise UndefinedApeError("APE is undefined for an actual value of zero")
    return abs(y - y_hat) / y


def _pairs(pairs) -> list[tuple[float, float]]:
    pairs = list(pairs)
    if not pairs:
        raise EmptyDataError("at least one (actual, forecast) pair is required")
    return pairs


def mape(pairs: Iterable[tuple[float, float]]) -> float:
    pairs = _pairs(pairs)
    return math.fsum(ape(y, f) for y, f in pairs) / len(pairs)


def mae(pairs: Iterable[tuple[float, float]]) -> float:
    pairs = _pairs(pairs)
    return math.fsum(abs(y - f) for y, f in pairs) / len(pairs)


def _ranks(shares: Mapping[str, float]) -> dict[str, int]:
    order = sorted(shares, key=lambda k: (-shares[k], k))
    return {k: i + 1 for i, k in enumerate(order)}


def _as_shares(x) -> Mapping[str, float]:
    if isinstance(x, ElectionOutcome):
        return x.adjusted
    if isinstance(x, ForecastShare):
        return x.shares
    return x


def rank_compare(outcome, forecast) -> tuple[dict[str, int], dict[str, int], int]:
    actual, predicted = _as_shares(outcome), _as_shares(forecast)
    if set(actual) != set(predicted):
        raise ValueError("outcome and forecast cover different options")
    real, fc = _ranks(actual), _ranks(predicted)
    return real, fc, sum(1 for k in real if real[k] != fc[k])


def poll_average(polls_in_week: Sequence[PollRecord], tracked: Iterable[str] | None = None,
                 week: WeekWindow | None = None) -> ForecastShare | None:
    """Per-option mean over the week's polls, renormalized over tracked options.

    Returns None when there are no polls (the basis is then absent).
    """
    if not polls_in_week:
        return None
    sums: dict[str, list[float]] = defaultdict(list)
    for poll in polls_in_week:
        for option, share in poll.shares.items():
            sums[option].append(float(share))
    means = {k: math.fsum(v) / len(v) for k, v in sums.items()}
    if tracked is not None:
        tracked = list(tracked)
        means = {k: means[k] for k in tracked if k in means}
    total = math.fsum(means.values())
    if not means or not total > 0:
        return None
    return ForecastShare({k: v / total for k, v in means.items()}, "poll_average", week)


def polls_by_week(polls: Iterable[PollRecord], voting_day: date) -> dict[WeekWindow, list[PollRecord]]:
    out: dict[WeekWindow, list[PollRecord]] = defaultdict(list)
    for poll in polls:
        if poll.published >= voting_day:
            continue
        out[WeekWindow.containing(poll.published, voting_day)].append(poll)
    return dict(out)


def read_polls_csv(path) -> list[PollRecord]:
    """Rows of date,option,share[,pollster]; one poll per (date, pollster)."""
    grouped: dict[tuple[date, str], dict[str, float]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"date", "option", "share"} - set(reader.fieldnames or ())
        if missing:
            raise ConfigError(f"{path}: poll CSV lacks column(s) {', '.join(sorted(missing))}")
        for line_no, row in enumerate(reader, start=2):
            try:
                key = (date.fromisoformat(row["date"].strip()), (row.get("pollster") or "").strip())
                share = float(row["share"])
            except ValueError as exc:
                raise ConfigError(f"{path}: line {line_no}: {exc}") from exc
            shares = grouped.setdefault(key, {})
            if row["option"] in shares:
                raise ConfigError(f"{path}: line {line_no}: option {row['option']!r} repeated in one poll")
            shares[row["option"]] = share
    return [PollRecord(d, shares, pollster) for (d, pollster), shares in sorted(grouped.items())]


def evaluate(outcome: ElectionOutcome, forecast: ForecastShare, params: Mapping | None = None) -> EvalReport:
    options = list(outcome.adjusted)
    if set(options) != set(forecast.shares):
        raise ValueError("forecast and outcome cover different options")
    real, fc, misranked = rank_compare(outcome, forecast)
    rows = []
    for k in options:
        y, f = outcome.adjusted[k], forecast.shares[k]
        rows.append(OptionError(k, outcome.official[k], y, f, abs(y - f) * 100.0, ape(y, f), real[k], fc[k]))
    pairs = [(outcome.adjusted[k], forecast.shares[k]) for k in options]
    return EvalReport(forecast.basis, forecast.week, tuple(rows), mape(pairs), mae(pairs) * 100.0,
                      misranked, params or {})


def write_eval_csv(report: EvalReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["option", "actual", "adjusted_actual", "forecast", "abs_error_pp", "ape",
                         "real_rank", "forecast_rank"])
        for r in report.rows:
            writer.writerow([r.option, repr(r.actual), repr(r.adjusted_actual), repr(r.forecast),
                             repr(r.abs_error_pp), repr(r.ape), r.real_rank, r.forecast_rank])
        writer.writerow(["MAPE", "", "", "", "", repr(report.mape), "", ""])
        writer.writerow(["MAE", "", "", "", repr(report.mae_pp), "", "", ""])


def write_eval_json(reports: Sequence[EvalReport], path, extra: Mapping | None = None) -> None:
    doc = dict(extra or {})
    doc["reports"] = [r.to_json() for r in reports]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
