"""Raw brand-importance dimensions over a window's token streams and pruned network.

prevalence   -- occurrences of the term across the window's token streams
diversity    -- degree of the term's node
connectivity -- weighted betweenness, arc length = 1 / co-occurrence count
"""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import OracleLimitError
from .graph import WordNetwork

TIE_EPS = 1e-12
# Sources are reduced in blocks whose size depends only on the node count, so the
# float summation order does not depend on how many workers ran them.
MIN_SOURCE_BLOCK = 8
MAX_SOURCE_BLOCKS = 64
BRUTE_FORCE_MAX_NODES = 12


@dataclass(frozen=True)
class RawScores:
    prevalence: int
    diversity: int
    connectivity: float


def prevalence(docs: Iterable, term: str) -> int:
    return sum((d.tokens if hasattr(d, "tokens") else d).count(term) for d in docs)


def prevalence_counts(docs: Iterable) -> dict[str, int]:
    counts: dict[str, int] = {}
    for d in docs:
        for t in (d.tokens if hasattr(d, "tokens") else d):
            counts[t] = counts.get(t, 0) + 1
    return counts


def degree(network: WordNetwork, term: str) -> int:
    return len(network.adjacency.get(term, ()))


def _indexed(network: WordNetwork):
    names = sorted(network.nodes)
    index = {n: i for i, n in enumerate(names)}
    adj = network.adjacency
    lists = [
        tuple((index[m], 1.0 / w) for m, w in sorted(adj[n].items()))
        for n in names
    ]
    return names, lists


def _single_source(adj: Sequence[Sequence[tuple[int, float]]], s: int, out: list[float]) -> None:
    """Dijkstra from s with path counting, then dependency accumulation into ``out``."""
    n = len(adj)
    dist = [math.inf] * n
    sigma = [0] * n
    preds: list[list[int]] = [[] for _ in range(n)]
    done = [False] * n
    order: list[int] = []
    dist[s] = 0.0
    sigma[s] = 1
    heap = [(0.0, s)]
    while heap:
        d, v = heapq.heappop(heap)
        if done[v] or d > dist[v]:
            continue
        done[v] = True
        order.append(v)
        sv = sigma[v]
        for u, length in adj[v]:
            if done[u]:
                continue
            nd = d + length
            du = dist[u]
            if nd < du - TIE_EPS:
                dist[u] = nd
                sigma[u] = sv
                preds[u] = [v]
                heapq.heappush(heap, (nd, u))
            elif nd <= du + TIE_EPS:
                sigma[u] += sv
                preds[u].append(v)
    delta = [0.0] * n
    for w in reversed(order):
        coeff = (1.0 + delta[w]) / sigma[w]
        for v in preds[w]:
            delta[v] += sigma[v] * coeff
        if w != s:
            out[w] += delta[w]


def _block_partial(adj, sources: range) -> list[float]:
    partial = [0.0] * len(adj)
    for s in sources:
        _single_source(adj, s, partial)
    return partial


_WORKER_ADJ = None


def _init_worker(adj):
    global _WORKER_ADJ
    _WORKER_ADJ = adj


def _worker_block(bounds):
    return _block_partial(_WORKER_ADJ, range(*bounds))


def weighted_betweenness(network: WordNetwork, jobs: int = 1) -> dict[str, float]:
    """Unnormalized betweenness on reciprocal-weight distances (Brandes, 2001).

    Each unordered pair {s, t} contributes once; endpoints are excluded.
    ``jobs > 1`` farms source blocks out to worker processes; the result is
    bit-identical to the serial run.
    """
    names, adj = _indexed(network)
    n = len(names)
    if n == 0:
        return {}
    size = max(MIN_SOURCE_BLOCK, -(-n // MAX_SOURCE_BLOCKS))
    blocks = [(lo, min(lo + size, n)) for lo in range(0, n, size)]
    if jobs > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(blocks)),
                                 initializer=_init_worker, initargs=(adj,)) as pool:
            partials = list(pool.map(_worker_block, blocks))
    else:
        partials = [_block_partial(adj, range(*b)) for b in blocks]
    total = [0.0] * n
    for partial in partials:
        for i, x in enumerate(partial):
            total[i] += x
    # every unordered pair was visited from both ends
    return {name: total[i] / 2.0 for i, name in enumerate(names)}


def brute_force_betweenness(network: WordNetwork) -> dict[str, float]:
    """Reference betweenness by exhaustive simple-path search, for small graphs only.

    Paths longer than the best known length (plus tolerance) are cut early;
    with positive arc lengths this never discards a shortest path.
    """
    names = sorted(network.nodes)
    if len(names) > BRUTE_FORCE_MAX_NODES:
        raise OracleLimitError(
            f"brute-force betweenness is limited to {BRUTE_FORCE_MAX_NODES} nodes, got {len(names)}")
    adj = network.adjacency
    scores = {n: 0.0 for n in names}

    def search(node, target, length, path, on_path, bound, found):
        if length > bound[0] + TIE_EPS:
            return
        if node == target:
            if length < bound[0] - TIE_EPS:
                bound[0] = length
                found.clear()
            found.append((length, tuple(path)))
            return
        for nxt, w in sorted(adj[node].items()):
            if nxt in on_path:
                continue
            on_path.add(nxt)
            path.append(nxt)
            search(nxt, target, length + 1.0 / w, path, on_path, bound, found)
            path.pop()
            on_path.discard(nxt)

    for i, s in enumerate(names):
        for t in names[i + 1:]:
            bound = [math.inf]
            found: list = []
            search(s, t, 0.0, [s], {s}, bound, found)
            shortest = [p for length, p in found if length <= bound[0] + TIE_EPS]
            if not shortest:
                continue
            share = 1.0 / len(shortest)
            for path in shortest:
                for v in path[1:-1]:
                    scores[v] += share
    return scores


def raw_scores(docs: Sequence, network: WordNetwork, terms: Iterable[str], jobs: int = 1) -> dict[str, RawScores]:
    counts = prevalence_counts(docs)
    betweenness = weighted_betweenness(network, jobs=jobs)
    return {
        t: RawScores(counts.get(t, 0), degree(network, t), betweenness.get(t, 0.0))
        for t in terms
    }
