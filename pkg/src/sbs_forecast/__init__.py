"""Semantic Brand Score of named entities over weekly news windows, and vote-share forecasts built on it."""

from .centrality import RawScores, brute_force_betweenness, degree, prevalence, weighted_betweenness
from .config import RunConfig, load_config
from .forecast import (
    ElectionOutcome, EvalReport, ForecastShare, adjust_actuals, ape, evaluate, forecast_shares, mae,
    mape, poll_average, rank_compare,
)
from .graph import GraphConfig, WordNetwork, build_cooccurrence, distance, merge, prune
from .ingest import Article, EventConfig, WeekWindow, fetch_news, filter_period, group_by_week, read_jsonl, write_jsonl
from .sbs import SbsScore, compute_sbs, sbs_timeseries, standardize
from .textprep import BrandLexicon, PrepConfig, TokenDoc, normalize_aliases, preprocess, remove_stopwords, stem, tokenize, truncate

__version__ = "0.1.0"
