"""Command-line front end.

    sbs-forecast fetch     --config run.json
    sbs-forecast score     --config run.json [--jobs N] [--out DIR]
    sbs-forecast forecast  --config run.json --lag 1 [--basis sbs] [--no-clamp]
    sbs-forecast evaluate  --config run.json [--basis sbs]
    sbs-forecast plot-data --config run.json

Exit codes: 0 success, 1 usage/config error, 2 empty data, 3 computation error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Mapping, Sequence

from .config import RunConfig, load_config
from .errors import ConfigError, EmptyDataError, SbsError
from .forecast import (
    BASES, ElectionOutcome, EvalReport, ForecastShare, adjust_actuals, evaluate, forecast_shares,
    poll_average, polls_by_week, write_eval_csv, write_eval_json,
)
from .ingest import WeekWindow, analysis_weeks, fetch_news, filter_period, group_by_week, read_jsonl
from .sbs import DIMENSIONS, SbsScore, read_timeseries_csv, sbs_timeseries, write_timeseries_csv
from .textprep import preprocess

LOGGER = logging.getLogger("sbs_forecast")

EXIT_OK, EXIT_USAGE, EXIT_EMPTY, EXIT_COMPUTE = 0, 1, 2, 3

TIMESERIES_FILE = "sbs_timeseries.csv"
SUMMARY_FILE = "score_summary.json"
PLOT_FILE = "plot_data.csv"
ACCURACY_FILE = "accuracy.csv"
PLOT_MEASURES = ("sbs",) + DIMENSIONS


class StageError(Exception):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


@contextmanager
def stage(name: str):
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def _dump_json(obj, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def run_fetch(config: RunConfig) -> Path:
    with stage("fetch"):
        articles = fetch_news(
            config.fetch.endpoint,
            config.event.keywords,
            (config.event.analysis_start, config.event.analysis_end),
            cache_path=config.corpus_path,
            language=config.fetch.language,
            page_size=config.fetch.page_size,
        )
    LOGGER.info("fetched %d articles into %s", len(articles), config.corpus_path)
    return config.corpus_path


def run_score(config: RunConfig, jobs: int | None = None) -> dict[str, Path]:
    """Corpus -> weekly SBS table, written as CSV plus a JSON summary."""
    jobs = jobs or config.jobs
    with stage("ingest"):
        if not config.corpus_path.exists():
            raise ConfigError(f"corpus not found: {config.corpus_path}")
        articles = filter_period(read_jsonl(config.corpus_path), config.event)
        if not articles:
            raise EmptyDataError("no articles in analysis period")
        buckets = group_by_week(articles, config.event)
    with stage("preprocess"):
        weekly = {w: [] for w in analysis_weeks(config.event)}
        for week, items in buckets.items():
            weekly[week] = [preprocess(a, week, config.lexicon, config.prep)
                            for a in sorted(items, key=lambda a: a.id)]
    with stage("score"):
        series = sbs_timeseries(weekly, config.event.tracked_brands, config.graph, jobs=jobs)
    with stage("report"):
        out = config.output_dir
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / TIMESERIES_FILE
        write_timeseries_csv(series, config.event.tracked_brands, csv_path)
        summary = {
            "params": config.provenance(),
            "n_articles": len(articles),
            "weeks": [
                {
                    "week_iso": w.label,
                    "lag": w.lag,
                    "n_articles": len(buckets.get(w, ())),
                    "n_tokens": sum(len(d.tokens) for d in weekly[w]),
                    "absent": series[w] is None,
                }
                for w in sorted(series)
            ],
        }
        summary_path = out / SUMMARY_FILE
        _dump_json(summary, summary_path)
    return {"timeseries": csv_path, "summary": summary_path}


def load_series(config: RunConfig) -> dict[WeekWindow, dict[str, SbsScore] | None]:
    path = config.output_dir / TIMESERIES_FILE
    if not path.exists():
        raise ConfigError(f"no SBS time series at {path}; run 'score' first")
    return read_timeseries_csv(path, config.event.voting_day)


def _week_for_lag(series: Mapping[WeekWindow, object], lag: int) -> WeekWindow:
    for week in series:
        if week.lag == lag:
            return week
    available = ", ".join(f"{w.label} (lag {w.lag})" for w in sorted(series, key=lambda w: w.lag))
    raise ConfigError(f"lag {lag} not in series; available weeks: {available}")


def forecasts_for_week(config: RunConfig, week: WeekWindow, scores: Mapping[str, SbsScore] | None,
                       bases: Sequence[str] = BASES, clamp: bool | None = None) -> dict[str, ForecastShare]:
    clamp = config.clamp if clamp is None else clamp
    out: dict[str, ForecastShare] = {}
    for basis in bases:
        if basis == "poll_average":
            polls = polls_by_week(config.event.poll_records, config.event.voting_day).get(week, [])
            share = poll_average(polls, config.event.tracked_brands, week)
            if share is not None:
                out[basis] = share
        elif scores is not None:
            values = {b: scores[b].measure(basis) for b in config.event.tracked_brands}
            out[basis] = forecast_shares(values, basis, week, clamp=clamp)
    return out


def _outcome(config: RunConfig) -> ElectionOutcome | None:
    if config.results is None:
        return None
    return adjust_actuals(config.results, config.event.tracked_brands)


def _check_basis(basis: str | None) -> tuple[str, ...]:
    if basis is None:
        return BASES
    if basis not in BASES:
        raise ConfigError(f"unknown basis {basis!r}; choose from {', '.join(BASES)}")
    return (basis,)


def run_forecast(config: RunConfig, lag: int, basis: str | None = None,
                 clamp: bool | None = None) -> dict[str, Path]:
    with stage("forecast"):
        bases = _check_basis(basis)
        series = load_series(config)
        week = _week_for_lag(series, lag)
        scores = series[week]
        if scores is None and "poll_average" not in bases:
            raise EmptyDataError(f"week {week.label} (lag {lag}) has no articles")
        shares = forecasts_for_week(config, week, scores, bases, clamp)
        if not shares:
            raise EmptyDataError(f"no forecast could be produced for week {week.label}")
    with stage("evaluate"):
        outcome = _outcome(config)
        reports = [evaluate(outcome, s, config.provenance()) for s in shares.values()] if outcome else []
    with stage("report"):
        out = config.output_dir
        out.mkdir(parents=True, exist_ok=True)
        paths = {}
        fc_csv = out / f"forecast_lag{lag}.csv"
        with open(fc_csv, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["week_iso", "lag", "basis", "option", "share", "clamped"])
            for b, fs in shares.items():
                for option, share in fs.shares.items():
                    writer.writerow([week.label, week.lag, b, option, repr(share),
                                     int(option in fs.clamped)])
        paths["forecast_csv"] = fc_csv
        fc_json = out / f"forecast_lag{lag}.json"
        _dump_json({
            "week_iso": week.label,
            "lag": week.lag,
            "forecasts": {b: {"shares": dict(fs.shares), "clamped": list(fs.clamped)}
                          for b, fs in shares.items()},
            "params": config.provenance(),
        }, fc_json)
        paths["forecast_json"] = fc_json
        for report in reports:
            p = out / f"evaluation_lag{lag}_{report.basis}.csv"
            write_eval_csv(report, p)
            paths[f"evaluation_{report.basis}"] = p
        if reports:
            p = out / f"evaluation_lag{lag}.json"
            write_eval_json(reports, p, {"poll_renormalized_over_tracked": True})
            paths["evaluation_json"] = p
    return paths


def run_evaluate(config: RunConfig, basis: str | None = None) -> Path:
    """Accuracy of every basis at every available week (one row per week x basis)."""
    with stage("evaluate"):
        bases = _check_basis(basis)
        outcome = _outcome(config)
        if outcome is None:
            raise ConfigError("evaluate needs event.results in the config")
        series = load_series(config)
        rows = []
        for week in sorted(series, key=lambda w: -w.lag):
            for b, fs in forecasts_for_week(config, week, series[week], bases).items():
                r: EvalReport = evaluate(outcome, fs)
                rows.append([week.label, week.lag, b, repr(r.mape), repr(r.mae_pp), r.n_misranked])
        if not rows:
            raise EmptyDataError("no week could be evaluated")
    with stage("report"):
        config.output_dir.mkdir(parents=True, exist_ok=True)
        path = config.output_dir / ACCURACY_FILE
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["week_iso", "lag", "basis", "mape", "mae_pp", "n_misranked"])
            writer.writerows(rows)
    return path


def emit_plot_data(series: Mapping[WeekWindow, Mapping[str, SbsScore] | None], path) -> Path:
    """Long-format week,brand,measure,value rows; absent weeks produce no rows."""
    if not series:
        raise EmptyDataError("empty series")
    rows = []
    for week in sorted(series):
        scores = series[week]
        if scores is None:
            continue
        for brand in sorted(scores):
            for measure in PLOT_MEASURES:
                rows.append((week.label, brand, measure, scores[brand].measure(measure)))
    write_plot_rows(rows, path)
    return Path(path)


def write_plot_rows(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["week", "brand", "measure", "value"])
        for week, brand, measure, value in rows:
            writer.writerow([week, brand, measure, repr(float(value))])


def read_plot_data(path) -> list[tuple[str, str, str, float]]:
    with open(path, encoding="utf-8", newline="") as fh:
        return [(r["week"], r["brand"], r["measure"], float(r["value"])) for r in csv.DictReader(fh)]


def run_plot_data(config: RunConfig) -> Path:
    with stage("plot-data"):
        series = load_series(config)
        config.output_dir.mkdir(parents=True, exist_ok=True)
        return emit_plot_data(series, config.output_dir / PLOT_FILE)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, type=Path, help="JSON run configuration")
    common.add_argument("--out", type=Path, help="output directory (overrides config)")
    common.add_argument("--jobs", type=int, help="worker processes for betweenness")
    common.add_argument("--no-clamp", action="store_true",
                        help="fail on non-positive scores instead of clamping them")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="sbs-forecast", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("fetch", parents=[common], help="download articles into the corpus JSONL")
    sub.add_parser("score", parents=[common], help="weekly SBS time series")
    p = sub.add_parser("forecast", parents=[common], help="vote-share forecast at one lag")
    p.add_argument("--lag", type=int, required=True, help="whole weeks before the voting week")
    p.add_argument("--basis", choices=BASES, help="score to forecast from (default: all)")
    p = sub.add_parser("evaluate", parents=[common], help="accuracy table over all weeks")
    p.add_argument("--basis", choices=BASES, help="restrict to one basis")
    sub.add_parser("plot-data", parents=[common], help="long-format series for plotting")
    return parser


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_USAGE
    if isinstance(exc, EmptyDataError):
        return EXIT_EMPTY
    return EXIT_COMPUTE


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.jobs is not None and args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        config = load_config(args.config)
        config = config.with_overrides(
            output_dir=args.out.resolve() if args.out else None,
            jobs=args.jobs,
            clamp=False if args.no_clamp else None,
        )
    except SbsError as exc:
        print(f"error [config]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "fetch":
            run_fetch(config)
        elif args.command == "score":
            run_score(config)
        elif args.command == "forecast":
            run_forecast(config, args.lag, args.basis)
        elif args.command == "evaluate":
            run_evaluate(config, args.basis)
        elif args.command == "plot-data":
            run_plot_data(config)
    except StageError as exc:
        print(f"error [{exc.stage}]: {exc.cause}", file=sys.stderr)
        return _exit_code(exc.cause)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
