from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from hyptype import corpus
from hyptype.connectivity import c1_equivalent
from hyptype.decision import (
    determinant,
    gram_determinant_oracle,
    hyperelliptic_model,
    is_hyperelliptic_type,
    is_specialization,
    jacobian_gram,
    jacobians_isomorphic,
    obstruction,
    verify_certificate,
)
from hyptype.errors import GraphError
from hyptype.graph import are_isomorphic, contract_edges, make_curve, stable_model
from hyptype.hyperelliptic import Involution, is_hyperelliptic
from hyptype.matroid import TwoIsomorphism
from hyptype.minors import K4, L3, connected_minors, verify_minor_model

from oracles import matrix_det

seeds = st.integers(min_value=0, max_value=2**31)
positive = st.fractions(min_value=Fraction(1, 8), max_value=8)


# ---------------------------------------------------------------- Gram matrices

def test_gram_single_loop():
    g = jacobian_gram(make_curve({"l": ("v", "v")}, {"l": 5}))
    assert g.matrix == ((5,),)


@given(positive, positive, positive)
def test_gram_theta_basis(a, b, c):
    gram = jacobian_gram(corpus.theta(a, b, c), basis=[{"a": 1, "b": -1}, {"b": 1, "c": -1}])
    assert [list(r) for r in gram.matrix] == [[a + b, -b], [-b, b + c]]


def test_gram_weight_direction():
    g = jacobian_gram(make_curve({"l": ("v", "v")}, {"l": 2}, {"v": 1}))
    assert g.matrix == ((2, 0), (0, 0))
    assert g.rank() == 1
    assert g.determinant() == 0
    assert g.cycle_determinant() == 2


def test_gram_basis_size_checked():
    with pytest.raises(GraphError):
        jacobian_gram(corpus.theta(), basis=[{"a": 1, "b": -1}])


def test_oracle_fixtures():
    assert gram_determinant_oracle(make_curve({"l": ("v", "v")}, {"l": 5})) == 5
    assert gram_determinant_oracle(corpus.theta(1, 1, 1)) == 3
    c3 = make_curve({"x": ("p", "q"), "y": ("q", "r"), "z": ("r", "p")}, {"x": 1, "y": 2, "z": 3})
    assert gram_determinant_oracle(c3) == 6
    # THETA(1,2,3): 1*2 + 2*3 + 1*3
    assert gram_determinant_oracle(corpus.theta(1, 2, 3)) == 11


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_gram_properties(seed):
    c = corpus.random_curve(seed, weighted=True, max_edges=10)
    assume(c.graph.b1 >= 1)
    gram = jacobian_gram(c)
    m = gram.matrix
    assert all(m[i][j] == m[j][i] for i in range(len(m)) for j in range(len(m)))
    assert gram.rank() == c.graph.b1
    assert gram.size == c.genus
    if gram.size <= 5:
        assert determinant(m) == matrix_det(m)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_gram_determinant_matches_tree_sum(seed):
    c = corpus.random_curve(seed, weighted=False)
    assert jacobian_gram(c).determinant() == gram_determinant_oracle(c)


# ---------------------------------------------------------------- Torelli comparison

def test_torelli_fixtures():
    ok, w = jacobians_isomorphic(corpus.fig1(1, 3), corpus.fig1(2, 2))
    assert ok and w.length_preserving
    assert jacobian_gram(corpus.fig1(1, 3)).determinant() == jacobian_gram(corpus.fig1(2, 2)).determinant()
    assert not jacobians_isomorphic(corpus.theta(1, 1, 1), corpus.theta(1, 1, 2))[0]
    assert not jacobians_isomorphic(corpus.theta(), corpus.k4())[0]


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_torelli_reflexive_and_gram_necessary(seed):
    c = corpus.random_curve(seed)
    assert jacobians_isomorphic(c, c)[0]
    s, _ = stable_model(c)
    if s.genus >= 2 and obstruction(s) is None:
        m = hyperelliptic_model(s).model
        assert jacobians_isomorphic(c, m)[0]
        if c.graph.b1:
            assert jacobian_gram(c).cycle_determinant() == jacobian_gram(m).cycle_determinant()


# ---------------------------------------------------------------- decision

def test_negative_fixtures():
    for g, name in ((corpus.k4(), "K4"), (corpus.l3(), "L3")):
        cert = is_hyperelliptic_type(g)
        assert not cert.verdict
        assert cert.minor.pattern == name
        assert verify_certificate(g, cert)


def test_positive_fixtures():
    for g in (corpus.theta(), corpus.fig1(1, 3), corpus.b2(), corpus.dumbbell(), corpus.theta(1, 2, 3)):
        cert = is_hyperelliptic_type(g)
        assert cert.verdict
        assert verify_certificate(g, cert)
        assert is_hyperelliptic(cert.model) is not None


def test_genus_one_rejected():
    with pytest.raises(GraphError):
        is_hyperelliptic_type(corpus.cycle(4))


def test_every_stable_genus_two_graph_is_positive():
    graphs = corpus.stable_graphs(2)
    assert len(graphs) == 7
    for g in graphs:
        cert = is_hyperelliptic_type(g)
        assert cert.verdict and verify_certificate(g, cert)


def test_verify_rejects_tampering():
    cert = is_hyperelliptic_type(corpus.fig1(1, 3))
    bad_witness = TwoIsomorphism(dict(cert.witness.mapping), False)
    assert not verify_certificate(corpus.fig1(1, 3), type(cert)(True, None, cert.model, cert.involution, bad_witness))
    ident = Involution.identity(cert.model)
    assert not verify_certificate(corpus.fig1(1, 3), type(cert)(True, None, cert.model, ident, cert.witness))
    neg = is_hyperelliptic_type(corpus.k4())
    assert not verify_certificate(corpus.theta(), neg)


def test_no_certificate_mode():
    cert = is_hyperelliptic_type(corpus.b2(), certificate=False)
    assert cert.verdict and cert.model is None


# ---------------------------------------------------------------- models

def test_fig1_model():
    m = hyperelliptic_model(corpus.fig1(1, 3))
    assert m.route == "averaging"
    assert m.model == corpus.fig1(2, 2)
    assert m.involution.edge_map["e"] == "f"


def test_b2_model():
    m = hyperelliptic_model(corpus.b2())
    assert m.route == "blocks"
    assert m.model.graph.ends == {"a": ("u", "v"), "b": ("u", "v"), "c": ("h0", "w"),
                                  "d": ("h0", "w"), "e": ("u", "w"), "f0": ("v", "h0")}
    assert m.model.lengths["e"] == m.model.lengths["f0"] == Fraction(1, 2)
    assert m.involution.edge_map["e"] == "f0"
    assert m.involution.flipped == {"a", "b", "c", "d"}


def test_hyperelliptic_input_model_is_average():
    c = corpus.theta(1, 2, 3)
    assert hyperelliptic_model(c).model == c
    d = corpus.dumbbell(1, 5, 2)
    assert hyperelliptic_model(d).model == d


def test_blocks_route_on_weighted_dumbbell():
    c = make_curve({"l": ("a", "a"), "bar": ("a", "b"), "m": ("b", "c"), "n": ("b", "c")},
                   {"l": 2, "bar": 1, "m": 1, "n": 3}, {"c": 1})
    m = hyperelliptic_model(c, route="blocks")
    assert jacobians_isomorphic(c, m.model)[0]
    assert is_hyperelliptic(m.model) is not None


def test_unknown_route():
    with pytest.raises(GraphError):
        hyperelliptic_model(corpus.theta(), route="other")


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_model_c1_equivalent(seed):
    c = corpus.random_curve(seed)
    s, _ = stable_model(c)
    assume(obstruction(s) is None)
    for route in ("auto", "blocks"):
        m = hyperelliptic_model(c, route=route)
        assert c1_equivalent(c, m.model)[0]


# ---------------------------------------------------------------- specialization

def test_specialization_fixtures():
    r = hyperelliptic_model(corpus.b2())
    found = is_specialization(corpus.b2(), r.model)
    # e and f0 are exchanged by the involution, so either contraction works
    assert found in (["e"], ["f0"])
    assert are_isomorphic(contract_edges(r.model, ["f0"])[0], corpus.b2())
    assert is_specialization(corpus.k4(), corpus.theta()) is None
    assert is_specialization(corpus.theta(), corpus.theta()) == []


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_specialization_of_contractions(seed):
    g = corpus.random_two_connected(seed, max_edges=9)
    e = sorted(g.ends)[0]
    h, _ = contract_edges(g, [e])
    assert is_specialization(h, g) is not None


# ---------------------------------------------------------------- closure / length independence

@settings(max_examples=30, deadline=None)
@given(seeds)
def test_minor_closure_and_length_independence(seed):
    c = corpus.random_curve(seed, max_edges=9)
    verdict = is_hyperelliptic_type(c, certificate=False).verdict
    assert is_hyperelliptic_type(corpus.with_random_lengths(c, seed + 1), certificate=False).verdict == verdict
    if verdict:
        for m in connected_minors(c, 2):
            assert is_hyperelliptic_type(m, certificate=False).verdict


def test_obstruction_models_verify():
    assert verify_minor_model(corpus.prism(), K4(), obstruction(corpus.prism()))
    assert verify_minor_model(corpus.l3(), L3(), obstruction(corpus.l3()))
    assert obstruction(corpus.b2()) is None
