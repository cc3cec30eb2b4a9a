"""Standardized dimensions and the composite Semantic Brand Score per weekly window."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .centrality import RawScores, raw_scores
from .errors import DegenerateWindowError
from .graph import GraphConfig, WordNetwork, build_cooccurrence, prune
from .ingest import WeekWindow

LOGGER = logging.getLogger(__name__)

DIMENSIONS = ("prevalence", "diversity", "connectivity")
CSV_COLUMNS = ["week_iso", "brand", "prevalence", "diversity", "connectivity",
               "z_prevalence", "z_diversity", "z_connectivity", "sbs"]


@dataclass(frozen=True)
class SbsScore:
    brand: str
    week: WeekWindow | None
    raw: RawScores
    z_prevalence: float
    z_diversity: float
    z_connectivity: float

    @property
    def composite(self) -> float:
        return self.z_prevalence + self.z_diversity + self.z_connectivity

    def measure(self, basis: str) -> float:
        """Standardized score backing a forecast basis."""
        if basis == "sbs":
            return self.composite
        if basis in DIMENSIONS:
            return getattr(self, f"z_{basis}")
        raise KeyError(f"unknown basis {basis!r}")


def relevant_set(network: WordNetwork, brands: Iterable[str]) -> list[str]:
    """Pruned-network nodes plus every tracked brand, in sorted order."""
    return sorted(set(network.nodes) | set(brands))


def standardize(values: Mapping[str, float], relevant: Sequence[str], dimension: str = "value",
                week: WeekWindow | None = None) -> dict[str, float]:
    """z-scores over ``relevant`` using the population (divide-by-N) standard deviation."""
    relevant = list(relevant)
    if len(relevant) < 2:
        raise DegenerateWindowError(dimension, week)
    xs = [float(values.get(t, 0.0)) for t in relevant]
    if max(xs) == min(xs):
        raise DegenerateWindowError(dimension, week)
    n = len(xs)
    mean = math.fsum(xs) / n
    std = math.sqrt(math.fsum((x - mean) ** 2 for x in xs) / n)
    if std == 0.0:
        raise DegenerateWindowError(dimension, week)
    return {t: (x - mean) / std for t, x in zip(relevant, xs)}


def compute_sbs(docs: Sequence, pruned_network: WordNetwork, brands: Sequence[str],
                week: WeekWindow | None = None, jobs: int = 1) -> dict[str, SbsScore]:
    relevant = relevant_set(pruned_network, brands)
    raw = raw_scores(docs, pruned_network, relevant, jobs=jobs)
    z = {
        dim: standardize({t: getattr(r, dim) for t, r in raw.items()}, relevant, dim, week)
        for dim in DIMENSIONS
    }
    out = {}
    for brand in brands:
        if raw[brand].prevalence == 0:
            LOGGER.warning("brand %r does not occur in week %s", brand,
                           week.label if week is not None else "?")
        out[brand] = SbsScore(brand, week, raw[brand],
                              z["prevalence"][brand], z["diversity"][brand], z["connectivity"][brand])
    return out


def score_week(docs: Sequence, brands: Sequence[str], graph_config: GraphConfig,
               week: WeekWindow | None = None, jobs: int = 1) -> dict[str, SbsScore]:
    network = prune(build_cooccurrence(docs, graph_config.window), graph_config.prune_min)
    return compute_sbs(docs, network, brands, week, jobs=jobs)


def sbs_timeseries(weekly_corpora: Mapping[WeekWindow, Sequence], brands: Sequence[str],
                   graph_config: GraphConfig = GraphConfig(), jobs: int = 1
                   ) -> dict[WeekWindow, dict[str, SbsScore] | None]:
    """One score per (week, brand); weeks without documents map to None (absent)."""
    table: dict[WeekWindow, dict[str, SbsScore] | None] = {}
    for week in sorted(weekly_corpora):
        docs = weekly_corpora[week]
        if not docs:
            table[week] = None
            continue
        table[week] = score_week(docs, brands, graph_config, week, jobs=jobs)
    return table


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def write_timeseries_csv(series: Mapping[WeekWindow, Mapping[str, SbsScore] | None],
                         brands: Sequence[str], path) -> None:
    """Absent weeks are kept as rows with empty score fields."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for week in sorted(series):
            scores = series[week]
            for brand in brands:
                if scores is None:
                    writer.writerow([week.label, brand] + [""] * 7)
                    continue
                s = scores[brand]
                writer.writerow([
                    week.label, brand, s.raw.prevalence, s.raw.diversity, _fmt(s.raw.connectivity),
                    _fmt(s.z_prevalence), _fmt(s.z_diversity), _fmt(s.z_connectivity), _fmt(s.composite),
                ])


def read_timeseries_csv(path, voting_day) -> dict[WeekWindow, dict[str, SbsScore] | None]:
    series: dict[WeekWindow, dict[str, SbsScore] | None] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            week = WeekWindow.parse(row["week_iso"], voting_day)
            if row["sbs"] == "":
                series.setdefault(week, None)
                continue
            raw = RawScores(int(row["prevalence"]), int(row["diversity"]), float(row["connectivity"]))
            score = SbsScore(row["brand"], week, raw, float(row["z_prevalence"]),
                             float(row["z_diversity"]), float(row["z_connectivity"]))
            bucket = series.get(week)
            if bucket is None:
                bucket = series[week] = {}
            bucket[row["brand"]] = score
    return dict(sorted(series.items()))
