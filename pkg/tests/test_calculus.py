import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import fln, graphons, oracle_degree, oracle_density, oracle_edge_density, oracle_restricted, trees
from logcalc.calculus import (Verdict, blakley_roy_audit, cfs_audit, forcing_check, mu_t_sample,
                              sidorenko_margin, smoothness_additivity_check, smoothness_margin,
                              smoothness_monte_carlo, tree_weight)
from logcalc.corpus import cycle_with_labeled_path, refl_square
from logcalc.graphon import StepGraphon
from logcalc.graphs import GraphError, LabeledGraph, build_cfs_graph, build_cycle, build_path, validate_labeled_tree
from logcalc.harness import random_step_graphon

HALF = StepGraphon.uniform([[1, Fraction(1, 2)], [Fraction(1, 2), 1]])
IDENT = StepGraphon.identity(2)
K2 = StepGraphon.uniform([[0, 1], [1, 0]])


def oracle_tree_weight(h: LabeledGraph, W: StepGraphon) -> dict:
    """f_T per block tuple straight from the product formula."""
    spec = validate_labeled_tree(h)
    deg, d = oracle_degree(W), oracle_edge_density(W)
    out = {}
    for a in product(range(W.m), repeat=len(spec.variables)):
        blk = dict(zip(spec.variables, a))
        val = 1 / d
        for v, r in zip(spec.variables, spec.degrees):
            x = deg[blk[v]]
            val *= x ** (1 - r) if x else (1 if r == 1 else 0)
        for u, v in spec.edges:
            val *= W.matrix[blk[u]][blk[v]]
        out[a] = val
    return out


def oracle_smoothness_lhs(h: LabeledGraph, W: StepGraphon) -> float:
    spec = validate_labeled_tree(h)
    f = oracle_tree_weight(h, W)
    hstar = h.without_edges(spec.edges)
    t = oracle_restricted(hstar, W)
    total = 0.0
    for a, val in f.items():
        mass = math.prod(W.node_weights[i] for i in a) * val
        if mass:
            total += float(mass) * fln(t[a])
    return total


# ---------------------------------------------------------------- tree weights


def test_edge_weight_on_identity():
    fw = tree_weight(LabeledGraph.from_edges([("a", "b")], labels=["a", "b"]), IDENT)
    assert fw.table[0, 0] == fw.table[1, 1] == 2
    assert fw.table[0, 1] == fw.table[1, 0] == 0
    assert fw.expectation() == 1
    assert fw.support == {(0, 0), (1, 1)}


def test_constant_graphon_weight_is_one():
    fw = tree_weight(build_path(3).with_labels(build_path(3).vertices), StepGraphon.constant(Fraction(2, 7), 3))
    assert all(v == 1 for _, v in fw.table.items())


def test_empty_tree_weight():
    fw = tree_weight(build_cycle(4), HALF)
    assert fw.expectation() == 1 and fw.variables == ()


def test_zero_density_rejected():
    with pytest.raises(ValueError):
        tree_weight(build_path(1).with_labels(["p0", "p1"]), StepGraphon.constant(0))


@given(trees(5), graphons(3), st.randoms(use_true_random=False))
def test_tree_weight_matches_formula(t, W, rnd):
    labels = list(t.vertices)
    rnd.shuffle(labels)
    h = t.with_labels(labels)
    fw = tree_weight(h, W)
    ref = oracle_tree_weight(h, W)
    assert all(fw.table[a] == v and v >= 0 for a, v in ref.items())


@given(trees(6), graphons(3, positive=True))
def test_tree_weight_normalized_exactly(t, W):
    h = t.with_labels(t.vertices)
    fw = tree_weight(h, W)
    assert fw.expectation() == 1
    deg, d = oracle_degree(W), oracle_edge_density(W)
    for v in fw.variables:
        assert list(fw.conditional(v).values) == [x / d for x in deg]


# ---------------------------------------------------------------- margins


def test_sidorenko_fixture():
    r = sidorenko_margin(build_cycle(4), HALF)
    assert r.exact["t"] == Fraction(41, 128) and r.exact["d"] == Fraction(3, 4)
    assert r.margin == pytest.approx(math.log(41 / 128) - 4 * math.log(3 / 4), abs=1e-15)
    assert abs(r.margin - 0.0123) < 1e-4


@given(st.sampled_from([build_path(3), build_cycle(6), build_cfs_graph(3, [(1, 2)])]),
       st.fractions(Fraction(1, 9), 1, max_denominator=9))
def test_sidorenko_constant_graphon_margin_zero(H, c):
    assert abs(sidorenko_margin(H, StepGraphon.constant(c, 2)).margin) < 1e-12


@given(trees(7))
def test_trees_tight_on_identity(t):
    if t.n_edges:
        assert abs(sidorenko_margin(t, IDENT).margin) < 1e-12


def test_sidorenko_zero_density_sentinel():
    r = sidorenko_margin(build_cycle(3), K2)
    assert r.margin == float("-inf") and r.exact["t"] == 0


def test_smoothness_c4_labeled_edge_against_closed_form():
    # mu(i, j) = p_i p_j W_ij / d; t_S(P_3)(i, j) = sum_ab p_a p_b W_ia W_ab W_bj
    W = HALF
    p, M = W.node_weights, W.matrix
    d = oracle_edge_density(W)
    lhs = 0.0
    for i, j in product(range(2), repeat=2):
        mu = p[i] * p[j] * M[i][j] / d
        t3 = sum(p[a] * p[b] * M[i][a] * M[a][b] * M[b][j] for a, b in product(range(2), repeat=2))
        lhs += float(mu) * math.log(t3)
    r = smoothness_margin(cycle_with_labeled_path(4, 1), W)
    assert r.lhs == pytest.approx(lhs, abs=1e-13)
    assert r.rhs == pytest.approx(3 * math.log(0.75), abs=1e-15)
    assert r.margin == pytest.approx(0.0116649867863, abs=1e-10)


def test_smoothness_no_unlabeled_edges():
    h = build_path(3).with_labels(build_path(3).vertices)
    r = smoothness_margin(h, HALF)
    assert r.lhs == r.rhs == r.margin == 0


def test_smoothness_c5_support_violation():
    h = cycle_with_labeled_path(5, 1)
    assert not smoothness_margin(h, IDENT).violated
    r = smoothness_margin(h, K2)
    assert r.violated and r.margin == float("-inf") and r.retract is False
    assert set(r.support_violation) == {(0, 1), (1, 0)}


@given(st.sampled_from([cycle_with_labeled_path(4, 1), cycle_with_labeled_path(6, 2),
                        refl_square(build_path(2), ["p0", "p2"]), cycle_with_labeled_path(5, 2)]),
       graphons(2, positive=True))
def test_smoothness_lhs_matches_oracle(h, W):
    assert smoothness_margin(h, W).lhs == pytest.approx(oracle_smoothness_lhs(h, W), rel=1e-12, abs=1e-12)


@given(st.integers(2, 4), st.data(), graphons(3, positive=True))
def test_even_cycle_paths_smooth(m, data, W):
    k = data.draw(st.integers(1, m))
    assert smoothness_margin(cycle_with_labeled_path(2 * m, k), W).margin >= -1e-9


# ---------------------------------------------------------------- audits


def test_blakley_roy_identity_all_tight():
    rep = blakley_roy_audit(3, IDENT)
    assert all(abs(s.margin) < 1e-12 for s in rep.steps) and abs(rep.final_margin) < 1e-12


@given(st.integers(1, 5), st.fractions(Fraction(1, 9), 1, max_denominator=9))
def test_blakley_roy_constant(n, c):
    rep = blakley_roy_audit(n, StepGraphon.constant(c, 2))
    assert all(abs(s.margin) < 1e-12 for s in rep.steps)


@given(st.integers(1, 5), graphons(3, positive=True))
def test_blakley_roy_positive(n, W):
    rep = blakley_roy_audit(n, W)
    assert rep.passed()
    assert oracle_density(build_path(n), W) >= oracle_edge_density(W) ** n
    assert rep.final_margin == pytest.approx(
        math.log(oracle_density(build_path(n), W)) - n * math.log(oracle_edge_density(W)), abs=1e-12)


def test_blakley_roy_zero_degree_block():
    W = StepGraphon.uniform([[1, 0], [0, 0]])
    assert blakley_roy_audit(3, W).passed()


def test_cfs_examples():
    assert abs(cfs_audit(1, [], HALF).final_margin) < 1e-12
    rep = cfs_audit(2, [(1, 2)], HALF)
    assert rep.final_margin == pytest.approx(sidorenko_margin(build_cycle(4), HALF).margin, abs=1e-12)
    assert rep.passed() and rep.q is not None and len(rep.s) == len(rep.h) == 1
    names = [s.name for s in rep.steps if s.kind == "inequality"]
    assert any("star" in n or "(k-1)" in n for n in names)
    const = cfs_audit(3, [(1, 2), (3,)], StepGraphon.constant(Fraction(2, 5), 2))
    assert all(abs(s.margin) < 1e-12 for s in const.steps)


@given(st.integers(1, 3), st.data(), graphons(3, positive=True))
def test_cfs_audit_properties(k, data, W):
    subsets = [tuple(j + 1 for j in range(k) if s >> j & 1) for s in range(1, 2 ** k)]
    sets = data.draw(st.lists(st.sampled_from(subsets), max_size=3))
    rep = cfs_audit(k, sets, W)
    assert rep.passed()
    assert abs(rep.chain_residual) < 1e-9
    sid = sidorenko_margin(build_cfs_graph(k, sets), W).margin
    assert rep.final_margin == pytest.approx(sid, abs=1e-12)


# ---------------------------------------------------------------- forcing, additivity


def test_forcing_examples():
    assert forcing_check(build_cycle(4), StepGraphon.constant(Fraction(3, 5), 2)).verdict is Verdict.CONSISTENT
    assert forcing_check(build_cycle(4), HALF).verdict is Verdict.STRICT
    with pytest.raises(GraphError):
        forcing_check(build_path(3), HALF)
    with pytest.raises(GraphError):
        forcing_check(build_cycle(5), HALF)


@given(st.sampled_from([build_cycle(4), build_cycle(6), build_cfs_graph(3, [(1, 2, 3)])]),
       graphons(3, positive=True))
def test_forcing_never_violated(H, W):
    assert forcing_check(H, W).verdict is not Verdict.VIOLATION


def test_additivity_examples():
    h = cycle_with_labeled_path(4, 1)
    rep = smoothness_additivity_check(h, h, HALF)
    assert rep.passed()
    assert rep.glued.margin == pytest.approx(2 * smoothness_margin(h, HALF).margin, abs=1e-9)
    bare = LabeledGraph.from_edges([("c0", "c1")], labels=["c0", "c1"])
    rep = smoothness_additivity_check(h, bare, HALF)
    assert rep.glued.margin == pytest.approx(rep.first.margin, abs=1e-12)
    const = smoothness_additivity_check(h, h, StepGraphon.constant(Fraction(1, 3)))
    assert abs(const.glued.margin) < 1e-12 and abs(const.first.margin) < 1e-12
    with pytest.raises(GraphError):
        smoothness_additivity_check(h, cycle_with_labeled_path(6, 2), HALF)


# ---------------------------------------------------------------- mu_T sampling


def test_sampler_edge_on_identity():
    fw = tree_weight(LabeledGraph.from_edges([("a", "b")], labels=["a", "b"]), IDENT)
    s = mu_t_sample(fw, 3, 20000)
    assert np.all(s[:, 0] == s[:, 1])
    assert abs(s[:, 0].mean() - 0.5) < 0.02


def test_sampler_constant_is_uniform():
    h = build_path(2).with_labels(build_path(2).vertices)
    fw = tree_weight(h, StepGraphon.constant(Fraction(1, 2), 3))
    s = mu_t_sample(fw, 1, 30000)
    counts = np.bincount(s[:, 0] * 9 + s[:, 1] * 3 + s[:, 2], minlength=27) / 30000
    assert np.all(np.abs(counts - 1 / 27) < 0.01)


def test_sampler_deterministic():
    fw = tree_weight(cycle_with_labeled_path(6, 2), random_step_graphon(3, 2, Fraction(1, 20)))
    assert np.array_equal(mu_t_sample(fw, 9, 100), mu_t_sample(fw, 9, 100))


@given(trees(4), graphons(2, positive=True), st.integers(0, 2**16))
def test_sampler_frequencies_match_mu(t, W, seed):
    h = t.with_labels(t.vertices)
    fw = tree_weight(h, W)
    n, count = len(fw.variables), 4000
    s = mu_t_sample(fw, seed, count)
    mu = fw.marginal(fw.variables).values
    for a in np.ndindex(mu.shape):
        p = float(mu[a])
        freq = np.mean(np.all(s == np.array(a), axis=1)) if n else 1.0
        assert abs(freq - p) <= 5 * math.sqrt(p * (1 - p) / count) + 1e-3


def test_monte_carlo_c4():
    mean, se, exact = smoothness_monte_carlo(cycle_with_labeled_path(4, 1), HALF, 0, 100000)
    assert abs(mean - exact) <= 3 * se


def test_monte_carlo_constant_integrand_is_exact():
    h = refl_square(build_path(1), [])
    mean, se, exact = smoothness_monte_carlo(h, HALF, 0, 1000)
    assert se == 0 and mean == exact
