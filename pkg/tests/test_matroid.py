import itertools

import pytest
from hypothesis import given, settings, strategies as st

from hyptype import corpus
from hyptype.errors import SizeGuardError
from hyptype.graph import are_isomorphic, make_curve, make_graph
from hyptype.matroid import (
    TwoIsomorphism,
    circuits,
    find_two_isomorphism,
    fundamental_cycles,
    verify_two_isomorphism,
)

from oracles import brute_circuits, brute_two_isomorphic

seeds = st.integers(min_value=0, max_value=2**31)


def whitney_pair():
    """Two graphs glued from the same two pieces along {a, b}, one piece twisted.

    The doubled edge of the second piece sits at ``a`` in one and at ``b``
    in the other, so the degree sequences differ.
    """
    left = {"ap": ("a", "p"), "pb1": ("p", "b"), "pb2": ("p", "b")}
    g1 = make_graph({**left, "aq1": ("a", "q"), "aq2": ("a", "q"), "qb": ("q", "b")})
    g2 = make_graph({**left, "aq1": ("b", "q"), "aq2": ("b", "q"), "qb": ("q", "a")})
    return g1, g2


def test_circuit_fixtures():
    assert sorted(len(c) for c in circuits(corpus.theta()).circuits) == [2, 2, 2]
    assert [len(c) for c in circuits(corpus.cycle(4)).circuits] == [4]
    view = circuits(make_graph({"l": ("v", "v")}, {"v": 1}))
    assert len(view.circuits) == 2
    assert all(len(c) == 1 for c in view.circuits)
    assert len(view.loops) == 2


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_circuits_match_subset_oracle(seed):
    g = corpus.random_two_connected(seed, max_edges=10)
    assert circuits(g).graph_circuits == brute_circuits(g)


def test_fundamental_cycles_rank():
    g = corpus.prism()
    assert len(fundamental_cycles(g)) == g.b1 == 4


def test_two_isomorphism_relabel():
    w = find_two_isomorphism(corpus.theta(1, 2, 3), corpus.theta(3, 1, 2), length_preserving=True)
    assert w is not None
    assert w.mapping == {"a": "b", "b": "c", "c": "a"}
    assert verify_two_isomorphism(corpus.theta(1, 2, 3), corpus.theta(3, 1, 2), w)


def test_two_isomorphism_size_mismatch():
    assert find_two_isomorphism(corpus.cycle(4), corpus.theta()) is None


def test_whitney_twist():
    g1, g2 = whitney_pair()
    assert not are_isomorphic(g1, g2)
    # oracle: all 6! edge bijections
    assert brute_two_isomorphic(g1, g2)
    w = find_two_isomorphism(g1, g2)
    assert w is not None and verify_two_isomorphism(g1, g2, w)


def test_length_preserving_rejects():
    assert find_two_isomorphism(corpus.theta(1, 1, 1), corpus.theta(1, 1, 2), length_preserving=True) is None
    assert not brute_two_isomorphic(corpus.theta(1, 1, 1), corpus.theta(1, 1, 2), length_preserving=True)


def test_weight_markers_count():
    a = make_graph({"l": ("v", "v"), "m": ("v", "v")}, {"v": 1})
    b = make_graph({"l": ("v", "v"), "m": ("v", "v"), "n": ("v", "v")})
    assert find_two_isomorphism(a, b) is None


def test_inverse_and_composition():
    a, b, c = corpus.theta(1, 2, 3), corpus.theta(3, 1, 2), corpus.theta(2, 3, 1)
    ab = find_two_isomorphism(a, b, True)
    bc = find_two_isomorphism(b, c, True)
    assert verify_two_isomorphism(b, a, ab.inverse())
    assert verify_two_isomorphism(a, c, ab.then(bc))


def test_verify_rejects_bad_witness():
    g1, g2 = whitney_pair()
    bad = TwoIsomorphism({e: e for e in g1.ends}, False)
    assert verify_two_isomorphism(g1, g1, bad)
    swapped = dict(bad.mapping, ap="pb1", pb1="ap")
    assert not verify_two_isomorphism(g1, g1, TwoIsomorphism(swapped, False))


def test_size_guard():
    rose = make_graph({f"l{i}": ("v", "v") for i in range(17)})
    with pytest.raises(SizeGuardError):
        circuits(rose)


@settings(max_examples=25, deadline=None)
@given(seeds, seeds)
def test_symmetry(s1, s2):
    a = corpus.random_two_connected(s1, max_edges=7)
    b = corpus.random_two_connected(s2, max_edges=7)
    ab = find_two_isomorphism(a, b)
    ba = find_two_isomorphism(b, a)
    assert (ab is None) == (ba is None)
    if len(a.ends) == len(b.ends) <= 6:
        assert (ab is not None) == brute_two_isomorphic(a, b)


@settings(max_examples=30, deadline=None)
@given(seeds, st.randoms(use_true_random=False))
def test_isomorphism_implies_witness(seed, rnd):
    c = corpus.with_random_lengths(corpus.random_two_connected(seed, max_edges=9), seed)
    names = list(c.graph.weights)
    rnd.shuffle(names)
    rename = {v: f"x{i}" for i, v in enumerate(names)}
    edges = list(c.graph.ends)
    rnd.shuffle(edges)
    ends = {f"f{i}": tuple(rename[x] for x in c.graph.ends[e]) for i, e in enumerate(edges)}
    lengths = {f"f{i}": c.lengths[e] for i, e in enumerate(edges)}
    d = make_curve(ends, lengths)
    w = find_two_isomorphism(c, d, length_preserving=True)
    assert w is not None and verify_two_isomorphism(c, d, w)


def _induces_vertex_map(a, b, mapping) -> bool:
    """A bijection induced by a graph isomorphism maps edges at a vertex to edges at one vertex."""
    for v in a.weights:
        images = [b.ends[mapping[e]] for e in a.incident_edges(v)]
        common = set(images[0])
        for pair in images[1:]:
            common &= set(pair)
        if not common:
            return False
    return True


def test_three_connected_witnesses_are_isomorphisms():
    # every witness K4 -> K4 and W4 -> W4 comes from a vertex map
    wheel = make_graph({"h0": ("h", "r0"), "h1": ("h", "r1"), "h2": ("h", "r2"), "h3": ("h", "r3"),
                        "r01": ("r0", "r1"), "r12": ("r1", "r2"), "r23": ("r2", "r3"), "r30": ("r3", "r0")})
    for g in (corpus.k4(), wheel):
        view = circuits(g)
        target = view.graph_circuits
        ids = list(g.ends)
        count = 0
        for perm in itertools.permutations(ids):
            m = dict(zip(ids, perm))
            if {frozenset(m[e] for e in c) for c in target} == target:
                count += 1
                assert _induces_vertex_map(g, g, m)
        assert count > 0
