from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import graphons, oracle_degree, oracle_density, oracle_edge_density, oracle_restricted, \
    oracle_tensor, small_graphs, trees
from logcalc.density import (BlockTable, conditional_expectation, degree_function, edge_density, greedy_order,
                             hom_density, hom_density_elimination, restricted_density, table_from_function)
from logcalc.graphon import GraphonError, StepGraphon, tensor_power
from logcalc.graphs import LabeledGraph, build_cycle, build_path, glue, labeled_edge
from logcalc.harness import random_step_graphon

HALF = StepGraphon.uniform([[1, Fraction(1, 2)], [Fraction(1, 2), 1]])
IDENT = StepGraphon.identity(2)


def test_fixture_values():
    assert hom_density(LabeledGraph(("a", "b"), ()), HALF).value == 1
    assert hom_density(labeled_edge(), HALF).value == Fraction(3, 4)
    assert hom_density(build_cycle(4), IDENT).value == Fraction(1, 8)
    assert hom_density_elimination(build_cycle(4), IDENT).value == Fraction(1, 8)
    assert hom_density(build_cycle(4), HALF).value == Fraction(41, 128)
    assert hom_density_elimination(build_cycle(4), HALF).value == Fraction(41, 128)


def test_c4_trace_cross_check():
    # t(C_4) = tr((W P)^4) with P the diagonal of node weights
    for W in (HALF, IDENT, random_step_graphon(3, 5)):
        A = np.array([[W.matrix[i][j] * W.node_weights[j] for j in range(W.m)]
                      for i in range(W.m)], dtype=object)
        tr = np.trace(A @ A @ A @ A)
        assert hom_density(build_cycle(4), W).value == tr


def test_c6_on_random_four_block_graphon():
    W = random_step_graphon(4, 11)
    assert hom_density_elimination(build_cycle(6), W).value == hom_density(build_cycle(6), W).value


@given(small_graphs(5), graphons(3))
def test_evaluators_match_oracle(H, W):
    t = oracle_density(H, W)
    assert hom_density(H, W).value == t
    assert hom_density_elimination(H, W).value == t


@given(small_graphs(5), graphons(3), st.randoms(use_true_random=False))
def test_elimination_order_irrelevant(H, W, rnd):
    order = list(H.vertices)
    rnd.shuffle(order)
    assert hom_density_elimination(H, W, order).value == hom_density(H, W).value


@given(trees(7))
def test_trees_have_boundary_at_most_one(t):
    factors = [((u, v), None) for u, v in t.edges]
    order = greedy_order(factors, t.vertices)
    live = [set(e) for e, _ in factors]
    for v in order:
        touching = [f for f in live if v in f]
        merged = set().union(*touching) - {v}
        assert len(merged) <= 1
        live = [f for f in live if v not in f] + [merged]


@given(small_graphs(4), small_graphs(3), graphons(2))
def test_multiplicative_over_disjoint_union(A, B, W):
    B = LabeledGraph(tuple("w" + v for v in B.vertices), tuple(("w" + u, "w" + v) for u, v in B.edges))
    U = LabeledGraph(A.vertices + B.vertices, A.edges + B.edges)
    assert hom_density(U, W).value == hom_density(A, W).value * hom_density(B, W).value


@given(small_graphs(4), graphons(2, max_den=3))
def test_multiplicative_over_tensor_product(H, W):
    G2 = tensor_power(W, 2)
    assert G2.matrix == oracle_tensor(W).matrix and G2.node_weights == oracle_tensor(W).node_weights
    assert hom_density(H, G2).value == hom_density(H, W).value ** 2


@given(small_graphs(5), st.fractions(0, 1, max_denominator=7))
def test_constant_graphon(H, c):
    W = StepGraphon.constant(c, 2)
    assert hom_density_elimination(H, W).value == c ** H.n_edges


@given(small_graphs(5, connected=True), graphons(3), st.data())
def test_restricted_density_matches_oracle(H, W, data):
    k = data.draw(st.integers(1, len(H.vertices)))
    labels = data.draw(st.permutations(H.vertices))[:k]
    H = H.with_labels(labels)
    table = restricted_density(H, W)
    ref = oracle_restricted(H, W)
    assert table.variables == H.labels
    assert all(table[idx] == v for idx, v in ref.items())
    assert table.expectation(W) == hom_density(H, W).value


def test_restricted_examples():
    one = LabeledGraph.from_edges([("x", "y")], labels=["x"])
    assert restricted_density(one, HALF).equals(degree_function(HALF))
    t = restricted_density(build_path(2, label_endpoints=True), IDENT)
    assert t[0, 0] == t[1, 1] == Fraction(1, 2) and t[0, 1] == t[1, 0] == 0
    full = build_cycle(4).with_labels(build_cycle(4).vertices)
    t = restricted_density(full, HALF)
    assert t[0, 1, 0, 1] == Fraction(1, 16)
    with pytest.raises(ValueError):
        restricted_density(build_cycle(4), HALF)


@given(graphons(3))
def test_degree_and_edge_density(W):
    assert list(degree_function(W).values) == oracle_degree(W)
    assert edge_density(W).value == oracle_edge_density(W) == hom_density(labeled_edge(), W).value


def test_degree_examples():
    assert list(degree_function(StepGraphon.constant(Fraction(1, 3), 2)).values) == [Fraction(1, 3)] * 2
    assert list(degree_function(IDENT).values) == [Fraction(1, 2)] * 2
    assert list(degree_function(HALF).values) == [Fraction(3, 4)] * 2
    assert edge_density(IDENT).value == Fraction(1, 2)


@given(graphons(3), st.data())
def test_conditional_expectation_tower(W, data):
    vals = data.draw(st.lists(st.fractions(0, 3, max_denominator=5), min_size=W.m ** 3, max_size=W.m ** 3))
    g = BlockTable(("a", "b", "c"), np.array(vals, dtype=object).reshape((W.m,) * 3))
    S = data.draw(st.sets(st.sampled_from("abc")))
    S2 = data.draw(st.sets(st.sampled_from(sorted(S)))) if S else set()
    inner = conditional_expectation(g, S, W)
    assert conditional_expectation(inner, S2, W).equals(conditional_expectation(g, S2, W))
    assert inner.expectation(W) == g.expectation(W)
    assert conditional_expectation(g, "abc", W).equals(g)


def test_conditional_expectation_of_w_is_degree():
    g = table_from_function(("x", "y"), HALF, lambda i, j: HALF.matrix[i][j])
    assert conditional_expectation(g, ["x"], HALF).equals(degree_function(HALF))
    with pytest.raises(ValueError):
        conditional_expectation(g, ["z"], HALF)


def test_large_values_use_exact_ints():
    # bound exceeds int64, exercises the object path
    W = StepGraphon((Fraction(1, 3), Fraction(2, 3)), ((Fraction(1, 997), Fraction(5, 991)),
                                                       (Fraction(5, 991), Fraction(3, 983))))
    H = build_cycle(8)
    assert hom_density_elimination(H, W).value == hom_density(H, W).value == oracle_density(H, W)


def test_graphon_validation():
    with pytest.raises(GraphonError, match="sum"):
        StepGraphon((Fraction(1, 2), Fraction(2, 5)), ((1, 0), (0, 1)))
    with pytest.raises(GraphonError, match="symmetric"):
        StepGraphon.uniform([[1, 0], [1, 1]])
    with pytest.raises(GraphonError, match="negative"):
        StepGraphon.uniform([[-1]])
    with pytest.raises(GraphonError, match="positive"):
        StepGraphon((Fraction(1), Fraction(0)), ((1, 0), (0, 1)))
    with pytest.raises(GraphonError):
        tensor_power(HALF, 0)


def test_tensor_square_of_edge_graphon():
    K2 = StepGraphon.from_adjacency([[0, 1], [1, 0]])
    G = tensor_power(K2, 2)
    assert G.m == 4 and tensor_power(K2, 1) == K2
    assert hom_density(build_cycle(4), G).value == hom_density(build_cycle(4), K2).value ** 2


@given(small_graphs(4), small_graphs(4), graphons(2))
def test_glue_with_no_labels_is_disjoint_product(A, B, W):
    assert hom_density(glue(A, B), W).value == hom_density(A, W).value * hom_density(B, W).value
