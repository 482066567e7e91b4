import itertools

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from hyptype import corpus
from hyptype.errors import GraphError
from hyptype.graph import genus, is_stable, is_two_connected

from oracles import nx_multigraph

seeds = st.integers(min_value=0, max_value=2**31)


def nx_isomorphic(a, b):
    ga, gb = nx_multigraph(a), nx_multigraph(b)
    for g, src in ((ga, a), (gb, b)):
        for v in g.nodes:
            g.nodes[v]["w"] = src.weights[v]
    return nx.is_isomorphic(ga, gb, node_match=lambda x, y: x["w"] == y["w"],
                            edge_match=lambda x, y: len(x) == len(y))


def test_trivalent_counts():
    assert len(corpus.trivalent_graphs(2)) == 2
    assert len(corpus.trivalent_graphs(3)) == 5
    with pytest.raises(GraphError):
        corpus.trivalent_graphs(1)


@pytest.mark.parametrize("g, count", [(2, 7), (3, 42)])
def test_stable_graph_counts(g, count):
    graphs = corpus.stable_graphs(g)
    assert len(graphs) == count
    assert all(is_stable(h) and genus(h) == g for h in graphs)
    # pairwise distinct under an independent isomorphism test
    for a, b in itertools.combinations(graphs, 2):
        assert not nx_isomorphic(a, b)


def test_edge_bound_filters():
    assert len(corpus.stable_graphs(3, 8)) == 42
    assert all(len(h.ends) <= 4 for h in corpus.stable_graphs(3, 4))


def test_sweep_corpus_size():
    names = [n for n, _ in corpus.sweep_corpus(random_count=10)]
    assert len(names) == 7 + 42 + 10
    assert len(set(names)) == len(names)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_random_generators(seed):
    g = corpus.random_two_connected(seed, max_edges=12)
    assert is_two_connected(g) and len(g.ends) <= 12
    assert not any(g.is_loop(e) for e in g.ends)
    assert corpus.random_two_connected(seed) == corpus.random_two_connected(seed)
    c = corpus.random_curve(seed)
    assert c == corpus.random_curve(seed)
    assert 2 <= c.genus <= 5 and len(c.graph.ends) <= 12
    assert is_stable(c)


def test_cross_validate_records():
    neg = corpus.cross_validate(corpus.k4(), "k4")
    assert neg.agree and not neg.minor_verdict and neg.obstruction == "K4"
    pos = corpus.cross_validate(corpus.b2(), "b2")
    assert pos.agree and pos.minor_verdict and pos.pipeline_ok and pos.torelli_ok
    assert pos.to_json()["agree"] is True
