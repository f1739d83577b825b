"""Graph families used by the verification suites.

Everything here is deterministic: same arguments, same list in the same order.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, combinations_with_replacement

import networkx as nx

from .graphs import (LabeledGraph, build_cfs_graph, build_cycle, build_path, build_reflection_tree,
                     glue, reflect, validate_labeled_tree)


def from_nx(g: nx.Graph, prefix: str = "t") -> LabeledGraph:
    idx = {v: i for i, v in enumerate(sorted(g.nodes))}
    return LabeledGraph(tuple(f"{prefix}{i}" for i in idx.values()),
                        tuple((f"{prefix}{idx[u]}", f"{prefix}{idx[v]}") for u, v in g.edges))


class IsoSet:
    """Collects graphs up to isomorphism (labels respected when present)."""

    def __init__(self, respect_labels: bool = False):
        self.respect_labels = respect_labels
        self.buckets: dict[str, list] = {}
        self.items: list[LabeledGraph] = []

    def _key(self, g: LabeledGraph):
        h = g.to_networkx()
        for v in h.nodes:
            h.nodes[v]["tag"] = str(h.nodes[v].get("label", "")) if self.respect_labels else ""
        return nx.weisfeiler_lehman_graph_hash(h, node_attr="tag"), h

    def add(self, g: LabeledGraph) -> bool:
        key, h = self._key(g)
        bucket = self.buckets.setdefault(key, [])
        match = (lambda a, b: a["tag"] == b["tag"]) if self.respect_labels else None
        if any(nx.is_isomorphic(h, other, node_match=match) for other in bucket):
            return False
        bucket.append(h)
        self.items.append(g)
        return True


def connected_graphs(max_vertices: int = 6) -> list[LabeledGraph]:
    """All connected graphs on 1..max_vertices vertices (max 7), from the atlas."""
    return [from_nx(g, "u") for g in nx.graph_atlas_g()[1:]
            if len(g) <= max_vertices and nx.is_connected(g)]


def small_trees(max_vertices: int) -> list[LabeledGraph]:
    out = [LabeledGraph(("t0",), ())]
    for n in range(2, max_vertices + 1):
        out.extend(from_nx(t) for t in nx.nonisomorphic_trees(n))
    return out


def independent_sets(g: LabeledGraph, nonempty: bool = False) -> list[tuple[str, ...]]:
    out = []
    for r in range(1 if nonempty else 0, len(g.vertices) + 1):
        out.extend(s for s in combinations(g.vertices, r) if g.is_independent(s))
    return out


def subtrees(t: LabeledGraph, max_size: int) -> list[tuple[str, ...]]:
    out = []
    for r in range(1, min(max_size, len(t.vertices)) + 1):
        out.extend(s for s in combinations(t.vertices, r) if t.induced(s).is_tree())
    return out


def reflection_ops(t: LabeledGraph, max_subtree: int = 4):
    """All (K, S) with K a subtree, S a non-empty independent proper subset of K."""
    ops = []
    for K in subtrees(t, max_subtree):
        sub = t.induced(K)
        for S in independent_sets(sub, nonempty=True):
            if len(S) < len(K):
                ops.append((K, S))
    return ops


def _automorphisms(g: LabeledGraph) -> list[dict]:
    h = g.to_networkx()
    return list(nx.algorithms.isomorphism.GraphMatcher(h, h).isomorphisms_iter())


@lru_cache(maxsize=None)
def reflection_tree_corpus(max_tree: int = 7, max_reflections: int = 3, max_subtree: int = 4,
                           max_vertices: int = 10) -> tuple[LabeledGraph, ...]:
    """Reflection trees up to isomorphism, trees included (zero reflections)."""
    seen = IsoSet()
    for tree in small_trees(max_tree):
        if len(tree.vertices) < 2:
            continue
        ops = reflection_ops(tree, max_subtree)
        index = {(frozenset(K), frozenset(S)): i for i, (K, S) in enumerate(ops)}
        # reflection multisets are only needed up to automorphisms of the tree
        images = [[index[frozenset(s[v] for v in K), frozenset(s[v] for v in S)] for K, S in ops]
                  for s in _automorphisms(tree)]
        cost = [len(K) - len(S) for K, S in ops]
        for r in range(max_reflections + 1):
            for combo in combinations_with_replacement(range(len(ops)), r):
                if len(tree.vertices) + sum(cost[i] for i in combo) > max_vertices:
                    continue
                if any(sorted(img[i] for i in combo) < list(combo) for img in images):
                    continue
                seen.add(build_reflection_tree(tree, [ops[i] for i in combo]))
    return tuple(seen.items)


def even_cycles(max_length: int = 8) -> list[LabeledGraph]:
    return [build_cycle(n) for n in range(4, max_length + 1, 2)]


@lru_cache(maxsize=None)
def cfs_corpus(max_k: int = 3, max_sets: int = 2) -> tuple[LabeledGraph, ...]:
    """CFS graphs (one vertex complete to the other side) up to isomorphism."""
    seen = IsoSet()
    for k in range(1, max_k + 1):
        subsets = [s for r in range(1, k + 1) for s in combinations(range(1, k + 1), r)]
        for m in range(max_sets + 1):
            for sets in combinations_with_replacement(subsets, m):
                seen.add(build_cfs_graph(k, sets))
    return tuple(seen.items)


def edge_orbits(g: LabeledGraph) -> list[tuple[str, str]]:
    """One representative (in both orientations) per edge orbit of Aut(g)."""
    h = g.to_networkx()
    autos = list(nx.algorithms.isomorphism.GraphMatcher(h, h).isomorphisms_iter())
    reps, covered = [], set()
    for u, v in g.edges:
        for a, b in ((u, v), (v, u)):
            if (a, b) in covered:
                continue
            reps.append((a, b))
            covered.update((s[a], s[b]) for s in autos)
    return reps


def edge_gluing(h1: LabeledGraph, e1, h2: LabeledGraph, e2) -> LabeledGraph:
    a = h1.with_labels(e1)
    b = h2.with_labels(e2)
    return glue(a, b).with_labels(())


@lru_cache(maxsize=None)
def edge_glue_corpus(max_cycle: int = 8, max_k: int = 3, max_sets: int = 2) -> tuple[LabeledGraph, ...]:
    """All edge-identifications of pairs from even cycles and CFS graphs."""
    base = even_cycles(max_cycle) + [g for g in cfs_corpus(max_k, max_sets) if g.n_edges]
    seen = IsoSet()
    for i, h1 in enumerate(base):
        e1 = h1.edges[0]
        for h2 in base[i:]:
            for e2 in edge_orbits(h2):
                # fixing e1 and letting e2 run over oriented orbits covers all identifications
                for f1 in (e1, e1[::-1]):
                    seen.add(edge_gluing(h1, f1, h2, e2))
    return tuple(seen.items)


# ---------------------------------------------------------------- smooth families


def cycle_with_labeled_path(length: int, path_edges: int) -> LabeledGraph:
    c = build_cycle(length)
    return c.with_labels(f"c{i}" for i in range(path_edges + 1))


def refl_square(tree: LabeledGraph, S) -> LabeledGraph:
    """T glued to a copy of itself along S, with the original copy labeled."""
    t = tree.with_labels(tree.vertices)
    return reflect(t, tree.vertices, S)


def cfs_with_star(k: int, sets) -> LabeledGraph:
    g = build_cfs_graph(k, sets)
    return g.with_labels(["x"] + [f"v{i}" for i in range(1, k + 1)])


def extend_labeled_tree(h: LabeledGraph, at: str, name: str = "ext") -> LabeledGraph:
    """Glue a pendant edge at labeled vertex ``at`` and label the new leaf too."""
    leaf = name
    while leaf in h.vertices:
        leaf += "'"
    g = LabeledGraph(h.vertices + (leaf,), h.edges + ((at, leaf),), h.labels)
    return g.with_labels(h.labels + (leaf,))


@lru_cache(maxsize=None)
def smooth_corpus() -> tuple[LabeledGraph, ...]:
    """Labeled graphs whose labeled tree is smooth by the gluing, reflection and extension rules."""
    out = []
    for m in (2, 3, 4):
        for k in range(1, m + 1):
            out.append(cycle_with_labeled_path(2 * m, k))
    for tree in small_trees(5):
        if len(tree.vertices) < 2:
            continue
        for S in independent_sets(tree):
            out.append(refl_square(tree, S))
    for k, sets in [(2, [(1, 2)]), (3, [(1, 2)]), (3, [(1, 2, 3)]), (3, [(1,), (2, 3)]), (3, [(1, 2), (2, 3)])]:
        out.append(cfs_with_star(k, sets))
    base = [cycle_with_labeled_path(4, 1), cycle_with_labeled_path(6, 2), cfs_with_star(2, [(1, 2)])]
    for h in base:
        for v in h.labels:
            out.append(extend_labeled_tree(h, v))
    for g in out:
        validate_labeled_tree(g)
    return tuple(out)


def glue_pairs(corpus) -> list[tuple[LabeledGraph, LabeledGraph]]:
    """Pairs from ``corpus`` that induce the same labeled tree."""
    from .graphs import labeled_tree_key
    groups: dict = {}
    for g in corpus:
        groups.setdefault(labeled_tree_key(g), []).append(g)
    pairs = []
    for items in groups.values():
        for i, a in enumerate(items):
            for b in items[i:]:
                pairs.append((a, b))
    return pairs


def non_retract_corpus() -> list[LabeledGraph]:
    """Non-bipartite and bipartite labeled graphs whose labeled tree (at most
    three vertices) is not a retract."""
    out = []
    for n in (3, 5, 7):
        c = build_cycle(n)
        out.append(c.with_labels(["c0", "c1"]))
        out.append(c.with_labels(["c0", "c1", "c2"]) if n > 3 else c.with_labels(["c0", "c1"]))
    k4 = LabeledGraph.from_edges(combinations("abcd", 2), labels=["a", "b"])
    out.append(k4)
    return out


def retract_pairs(max_vertices: int = 5, max_tree: int = 3):
    """(H, labeled H) for every connected H up to ``max_vertices`` and every
    labeling whose labeled vertices span a tree on at most ``max_tree`` vertices."""
    out = []
    for g in connected_graphs(max_vertices):
        if g.n_edges == 0:
            continue
        for r in range(2, max_tree + 1):
            for S in combinations(g.vertices, r):
                if g.induced(S).is_tree():
                    out.append(g.with_labels(S))
    return out


def sidorenko_basics() -> list[LabeledGraph]:
    """Small bipartite graphs known to be Sidorenko: paths, stars, even cycles, CFS."""
    out = [build_path(n) for n in (1, 2, 3, 4)]
    out += even_cycles(8)
    out += [build_cfs_graph(3, []), build_cfs_graph(2, [(1, 2)]), build_cfs_graph(3, [(1, 2, 3)]),
            build_cfs_graph(3, [(1,), (2, 3)]), build_cfs_graph(3, [(1, 2), (2, 3)])]
    return out
