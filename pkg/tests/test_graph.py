import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from sbs_forecast.errors import ConfigError, MissingArcError
from sbs_forecast.graph import GraphConfig, WordNetwork, build_cooccurrence, distance, merge, prune


def naive_pairs(streams, window):
    """All position pairs, filtered by distance: O(n^2) per stream."""
    counts = Counter()
    for tokens in streams:
        for i in range(len(tokens)):
            for j in range(len(tokens)):
                if i < j and j - i <= window and tokens[i] != tokens[j]:
                    counts[tuple(sorted((tokens[i], tokens[j])))] += 1
    return counts


def test_happy_holidays_ten_times():
    net = build_cooccurrence([["happi", "holiday"]] * 10, 7)
    assert net.arcs == {("happi", "holiday"): 10}


def test_all_pairs_within_window():
    assert build_cooccurrence([["a", "b", "c"]], 7).arcs == {("a", "b"): 1, ("a", "c"): 1, ("b", "c"): 1}


def test_distance_eight_is_outside_window():
    tokens = ["a"] + ["x"] * 7 + ["b"]
    net = build_cooccurrence([tokens], 7)
    assert ("a", "b") not in net.arcs
    assert net.arcs == naive_pairs([tokens], 7)


def test_window_does_not_cross_documents():
    net = build_cooccurrence([["a"], ["b"]], 7)
    assert net.arcs == {} and net.nodes == {"a", "b"}


def test_no_self_loops_from_repeats():
    net = build_cooccurrence([["a", "a", "b", "a"]], 7)
    assert net.arcs == {("a", "b"): 3}  # positions (0,2), (1,2), (2,3)


@given(st.lists(st.lists(st.sampled_from("abcdefg"), max_size=40), max_size=6), st.integers(1, 10))
def test_matches_naive_oracle_and_mass(streams, window):
    net = build_cooccurrence(streams, window)
    assert net.arcs == dict(naive_pairs(streams, window))
    assert net.total_weight() == sum(naive_pairs(streams, window).values())
    assert all(a != b for a, b in net.arcs)
    assert net.nodes == {t for s in streams for t in s}


def test_prune_threshold():
    net = WordNetwork(arcs={("a", "b"): 1, ("b", "c"): 2})
    pruned = prune(net, 2)
    assert pruned.arcs == {("b", "c"): 2}
    assert pruned.nodes == {"b", "c"}
    assert prune(WordNetwork(), 2) == WordNetwork()


_nets = st.dictionaries(
    st.tuples(st.sampled_from("abcdefgh"), st.sampled_from("abcdefgh")).filter(lambda p: p[0] < p[1]),
    st.integers(1, 6), max_size=20,
).map(lambda arcs: WordNetwork(arcs=arcs))


@given(_nets, st.integers(1, 6), st.integers(1, 6))
def test_prune_properties(net, k, k2):
    once = prune(net, k)
    assert prune(once, k) == once
    assert prune(net, 1).arcs == net.arcs
    lo, hi = sorted((k, k2))
    for node in net.nodes:
        deg_hi = len(prune(net, hi).adjacency.get(node, {}))
        deg_lo = len(prune(net, lo).adjacency.get(node, {}))
        assert deg_hi <= deg_lo


def test_merge_identity_and_commutativity():
    a = build_cooccurrence([["x", "y", "z"]], 7)
    b = build_cooccurrence([["y", "z", "w"]], 7)
    assert merge([a, WordNetwork()]) == a
    assert merge([a, b]) == merge([b, a])
    assert merge([a, b]).arcs[("y", "z")] == 2


def test_merge_of_doc_networks_equals_batch_build():
    rng = random.Random(7)
    for _ in range(50):
        docs = [[rng.choice("abcdefghij") for _ in range(rng.randint(0, 30))] for _ in range(rng.randint(1, 6))]
        w = rng.randint(1, 10)
        parts = [build_cooccurrence([d], w) for d in docs]
        rng.shuffle(parts)
        assert merge(parts) == build_cooccurrence(docs, w)


@pytest.mark.parametrize("w,expected", [(20, 0.05), (1, 1.0), (4, 0.25)])
def test_distance(w, expected):
    net = WordNetwork(arcs={("a", "b"): w})
    assert distance(net, ("b", "a")) == expected


def test_distance_missing_arc():
    with pytest.raises(MissingArcError):
        distance(WordNetwork(arcs={("a", "b"): 1}), ("a", "c"))


def test_network_rejects_self_loop_and_zero_weight():
    with pytest.raises(ValueError):
        WordNetwork(arcs={("a", "a"): 1})
    with pytest.raises(ValueError):
        WordNetwork(arcs={("a", "b"): 0})


def test_graph_config_bounds():
    assert GraphConfig() == GraphConfig(7, 2)
    with pytest.raises(ConfigError):
        GraphConfig(window=0)
    with pytest.raises(ConfigError):
        GraphConfig(prune_min=0)


def test_csv_dump_round_trip(tmp_path):
    net = WordNetwork(arcs={("b", "a"): 3, ("c", "b"): 2})
    path = tmp_path / "net.csv"
    net.to_csv(path)
    assert path.read_text() == "source,target,weight\na,b,3\nb,c,2\n"
    assert WordNetwork.from_csv(path) == net
