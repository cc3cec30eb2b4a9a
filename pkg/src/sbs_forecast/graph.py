"""Undirected weighted word co-occurrence networks."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, MissingArcError


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class GraphConfig:
    window: int = 7
    prune_min: int = 2

    def __post_init__(self):
        if int(self.window) != self.window or self.window < 1:
            raise ConfigError(f"window must be a positive integer, got {self.window!r}")
        if int(self.prune_min) != self.prune_min or self.prune_min < 1:
            raise ConfigError(f"prune_min must be a positive integer, got {self.prune_min!r}")


class WordNetwork:
    """Word nodes plus co-occurrence counts keyed by the sorted token pair.

    Treat instances as immutable once built.
    """

    __slots__ = ("nodes", "arcs", "_adj")

    def __init__(self, nodes: Iterable[str] = (), arcs: Mapping[tuple[str, str], int] | None = None):
        node_set = set(nodes)
        clean: dict[tuple[str, str], int] = {}
        for (a, b), w in (arcs or {}).items():
            if a == b:
                raise ValueError(f"self-loop on {a!r}")
            if w < 1:
                raise ValueError(f"arc {a!r}-{b!r} has weight {w} < 1")
            key = _pair(a, b)
            clean[key] = clean.get(key, 0) + int(w)
            node_set.update(key)
        self.nodes = frozenset(node_set)
        self.arcs = dict(sorted(clean.items()))
        self._adj = None

    def __eq__(self, other):
        return isinstance(other, WordNetwork) and self.nodes == other.nodes and self.arcs == other.arcs

    def __repr__(self):
        return f"WordNetwork({len(self.nodes)} nodes, {len(self.arcs)} arcs)"

    @property
    def adjacency(self) -> dict[str, dict[str, int]]:
        if self._adj is None:
            adj: dict[str, dict[str, int]] = {n: {} for n in sorted(self.nodes)}
            for (a, b), w in self.arcs.items():
                adj[a][b] = w
                adj[b][a] = w
            self._adj = adj
        return self._adj

    def weight(self, a: str, b: str) -> int:
        try:
            return self.arcs[_pair(a, b)]
        except KeyError:
            raise MissingArcError(f"no arc between {a!r} and {b!r}") from None

    def total_weight(self) -> int:
        return sum(self.arcs.values())

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["source", "target", "weight"])
            for (a, b), w in self.arcs.items():
                writer.writerow([a, b, w])

    @classmethod
    def from_csv(cls, path) -> "WordNetwork":
        with open(path, encoding="utf-8", newline="") as fh:
            rows = csv.DictReader(fh)
            return cls(arcs={(r["source"], r["target"]): int(r["weight"]) for r in rows})


def _doc_tokens(doc) -> Sequence[str]:
    return doc.tokens if hasattr(doc, "tokens") else doc


def build_cooccurrence(docs: Iterable, window: int = 7) -> WordNetwork:
    """Count every token pair at positional distance 1..window inside each doc.

    ``docs`` may be TokenDocs or plain token sequences.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    counts: Counter = Counter()
    nodes: set[str] = set()
    for doc in docs:
        tokens = _doc_tokens(doc)
        nodes.update(tokens)
        n = len(tokens)
        for i, left in enumerate(tokens):
            for j in range(i + 1, min(i + window, n - 1) + 1):
                right = tokens[j]
                if right != left:
                    counts[_pair(left, right)] += 1
    return WordNetwork(nodes, counts)


def prune(network: WordNetwork, prune_min: int = 2) -> WordNetwork:
    kept = {k: w for k, w in network.arcs.items() if w >= prune_min}
    return WordNetwork(arcs=kept)


def merge(networks: Iterable[WordNetwork]) -> WordNetwork:
    counts: Counter = Counter()
    nodes: set[str] = set()
    for net in networks:
        nodes.update(net.nodes)
        counts.update(net.arcs)
    return WordNetwork(nodes, counts)


def distance(network: WordNetwork, arc: tuple[str, str]) -> float:
    """Reciprocal co-occurrence count: heavy arcs are short."""
    return 1.0 / network.weight(*arc)
