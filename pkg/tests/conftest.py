"""Shared strategies and pure-Python oracles (independent of the package internals)."""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, product

from hypothesis import settings, strategies as st

from logcalc.graphon import StepGraphon
from logcalc.graphs import LabeledGraph

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


# ---------------------------------------------------------------- oracles


def oracle_density(H: LabeledGraph, W: StepGraphon) -> Fraction:
    """t(H, W) by a plain loop over every block assignment."""
    m, vs = W.m, H.vertices
    total = Fraction(0)
    for phi in product(range(m), repeat=len(vs)):
        a = dict(zip(vs, phi))
        term = Fraction(1)
        for v in vs:
            term *= W.node_weights[a[v]]
        for u, v in H.edges:
            term *= W.matrix[a[u]][a[v]]
            if not term:
                break
        total += term
    return total


def oracle_restricted(H: LabeledGraph, W: StepGraphon) -> dict:
    """t_S(H, W) as a dict from label-block tuples to Fractions."""
    m = W.m
    free = [v for v in H.vertices if v not in H.labels]
    out = {}
    for fixed in product(range(m), repeat=len(H.labels)):
        total = Fraction(0)
        for rest in product(range(m), repeat=len(free)):
            a = dict(zip(H.labels, fixed)) | dict(zip(free, rest))
            term = Fraction(1)
            for v in free:
                term *= W.node_weights[a[v]]
            for u, v in H.edges:
                term *= W.matrix[a[u]][a[v]]
            total += term
        out[fixed] = total
    return out


def oracle_degree(W: StepGraphon) -> list[Fraction]:
    return [sum(W.node_weights[j] * W.matrix[i][j] for j in range(W.m)) for i in range(W.m)]


def oracle_edge_density(W: StepGraphon) -> Fraction:
    return sum(W.node_weights[i] * x for i, x in enumerate(oracle_degree(W)))


def oracle_has_retract(H: LabeledGraph, S) -> bool:
    """Exhaustive search over all maps V(H) -> S fixing S."""
    S = list(S)
    free = [v for v in H.vertices if v not in S]
    for img in product(S, repeat=len(free)):
        phi = dict(zip(free, img)) | {s: s for s in S}
        if all(H.has_edge(phi[u], phi[v]) for u, v in H.edges):
            return True
    return False


def oracle_tensor(W: StepGraphon) -> StepGraphon:
    m = W.m
    pairs = [(i, j) for i in range(m) for j in range(m)]
    p = tuple(W.node_weights[i] * W.node_weights[j] for i, j in pairs)
    mat = tuple(tuple(W.matrix[a][c] * W.matrix[b][d] for c, d in pairs) for a, b in pairs)
    return StepGraphon(p, mat)


def all_01_graphons(max_blocks: int):
    for m in range(1, max_blocks + 1):
        cells = [(i, j) for i in range(m) for j in range(i, m)]
        for bits in product((0, 1), repeat=len(cells)):
            mat = [[0] * m for _ in range(m)]
            for (i, j), b in zip(cells, bits):
                mat[i][j] = mat[j][i] = b
            yield StepGraphon.uniform(mat)


def fln(x) -> float:
    return math.log(x) if x > 0 else float("-inf")


# ---------------------------------------------------------------- strategies


@st.composite
def graphons(draw, max_blocks=3, positive=False, max_den=6):
    m = draw(st.integers(1, max_blocks))
    raw = draw(st.lists(st.integers(1, 5), min_size=m, max_size=m))
    p = tuple(Fraction(x, sum(raw)) for x in raw)
    lo = 1 if positive else 0
    mat = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        for j in range(i, m):
            mat[i][j] = mat[j][i] = Fraction(draw(st.integers(lo, max_den)), max_den)
    if not any(x for r in mat for x in r):
        mat[0][0] = Fraction(1)
    return StepGraphon(p, tuple(tuple(r) for r in mat))


@st.composite
def small_graphs(draw, max_vertices=5, connected=False):
    n = draw(st.integers(1, max_vertices))
    vs = [f"v{i}" for i in range(n)]
    pairs = list(combinations(vs, 2))
    if connected:
        edges = {tuple(sorted((vs[i], vs[draw(st.integers(0, i - 1))]))) for i in range(1, n)}
    else:
        edges = set()
    edges |= {e for e in pairs if draw(st.booleans())}
    return LabeledGraph(tuple(vs), tuple(sorted(edges)))


@st.composite
def trees(draw, max_vertices=6):
    n = draw(st.integers(1, max_vertices))
    vs = [f"t{i}" for i in range(n)]
    edges = [(vs[draw(st.integers(0, i - 1))], vs[i]) for i in range(1, n)]
    return LabeledGraph.from_edges(edges, vertices=vs)


# ---------------------------------------------------------------- acceptance reporting

ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
