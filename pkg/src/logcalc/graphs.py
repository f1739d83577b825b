"""Labeled graphs (the class of graphs with n labeled vertices) and the
constructions used by the logarithmic calculus: paths, cycles, stars, CFS
graphs, gluing, reflection, reflection trees, unlabeling and retracts.

Graphs are immutable. Vertex identifiers are strings; fresh vertices created by
``glue`` and ``reflect`` get deterministic primed names (``v``, ``v'``, ...).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping

import networkx as nx


class GraphError(ValueError):
    pass


def _edge(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class LabeledGraph:
    """Finite simple graph with the vertices ``labels[i]`` carrying label ``i + 1``."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        verts = tuple(sorted({str(v) for v in self.vertices}))
        if len(verts) != len(tuple(self.vertices)):
            raise GraphError("duplicate vertex identifiers")
        vset = set(verts)
        edges = set()
        for e in self.edges:
            u, v = (str(x) for x in e)
            if u == v:
                raise GraphError(f"loop at vertex {u!r}")
            if u not in vset or v not in vset:
                raise GraphError(f"edge ({u!r}, {v!r}) uses an unknown vertex")
            e = _edge(u, v)
            if e in edges:
                raise GraphError(f"duplicate edge {e}")
            edges.add(e)
        labels = tuple(str(v) for v in self.labels)
        if len(set(labels)) != len(labels):
            raise GraphError("labels must be injective")
        for v in labels:
            if v not in vset:
                raise GraphError(f"label on unknown vertex {v!r}")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(sorted(edges)))
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], labels: Iterable = (), vertices: Iterable = ()):
        edges = [tuple(map(str, e)) for e in edges]
        verts = {str(v) for v in vertices} | {v for e in edges for v in e} | {str(v) for v in labels}
        return cls(tuple(verts), tuple(edges), tuple(labels))

    @property
    def n_labels(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> Mapping[str, frozenset]:
        adj: dict[str, set] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return {v: frozenset(n) for v, n in adj.items()}

    def degree(self, v: str) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: str, v: str) -> bool:
        return v in self.adjacency.get(u, ())

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        for i, v in enumerate(self.labels, start=1):
            g.nodes[v]["label"] = i
        return g

    def induced(self, vs: Iterable[str]) -> LabeledGraph:
        """Induced subgraph on ``vs``; labels inside ``vs`` are kept in order."""
        vs = set(vs)
        if not vs <= set(self.vertices):
            raise GraphError("induced subgraph on vertices not in the graph")
        edges = [e for e in self.edges if e[0] in vs and e[1] in vs]
        return LabeledGraph(tuple(vs), tuple(edges), tuple(v for v in self.labels if v in vs))

    def with_labels(self, labels: Iterable[str]) -> LabeledGraph:
        return LabeledGraph(self.vertices, self.edges, tuple(labels))

    def without_edges(self, edges: Iterable[tuple[str, str]]) -> LabeledGraph:
        drop = {_edge(*e) for e in edges}
        return LabeledGraph(self.vertices, tuple(e for e in self.edges if e not in drop), self.labels)

    def is_independent(self, vs: Iterable[str]) -> bool:
        vs = list(vs)
        return not any(self.has_edge(u, v) for u, v in combinations(vs, 2))

    def is_connected(self) -> bool:
        return len(self.vertices) > 0 and nx.is_connected(self.to_networkx())

    def is_bipartite(self) -> bool:
        return nx.is_bipartite(self.to_networkx())

    def is_tree(self) -> bool:
        return self.is_connected() and self.n_edges == len(self.vertices) - 1

    def isomorphic(self, other: LabeledGraph, respect_labels: bool = False) -> bool:
        match = None
        if respect_labels:
            match = lambda a, b: a.get("label") == b.get("label")  # noqa: E731
        return nx.is_isomorphic(self.to_networkx(), other.to_networkx(), node_match=match)

    def __repr__(self):
        lab = f", labels={list(self.labels)}" if self.labels else ""
        return f"LabeledGraph(|V|={len(self.vertices)}, edges={list(self.edges)}{lab})"


@dataclass(frozen=True)
class TreeSpec:
    """A tree with all vertices labeled; ``degrees[i]`` is the degree of the
    vertex carrying label ``i + 1`` inside the tree."""

    graph: LabeledGraph
    degrees: tuple[int, ...]

    @property
    def variables(self) -> tuple[str, ...]:
        return self.graph.labels

    @property
    def edges(self):
        return self.graph.edges

    def __len__(self):
        return len(self.graph.labels)


# ---------------------------------------------------------------- families


def build_path(n_edges: int, label_endpoints: bool = False) -> LabeledGraph:
    if n_edges < 1:
        raise GraphError("a path needs at least one edge")
    vs = [f"p{i}" for i in range(n_edges + 1)]
    labels = (vs[0], vs[-1]) if label_endpoints else ()
    return LabeledGraph(tuple(vs), tuple(zip(vs, vs[1:])), labels)


def build_cycle(length: int) -> LabeledGraph:
    if length < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    vs = [f"c{i}" for i in range(length)]
    return LabeledGraph(tuple(vs), tuple((vs[i], vs[(i + 1) % length]) for i in range(length)))


def labeled_edge() -> LabeledGraph:
    return LabeledGraph(("a", "b"), (("a", "b"),), ("a", "b"))


def build_star(k: int) -> LabeledGraph:
    return build_cfs_graph(k, [])


def build_cfs_graph(k: int, attach_sets: Iterable[Iterable[int]]) -> LabeledGraph:
    """``x`` joined to ``v1..vk``; ``y_t`` joined to ``{v_j : j in S_t}``."""
    if k < 1:
        raise GraphError("k must be positive")
    sets = [frozenset(s) for s in attach_sets]
    vs = ["x"] + [f"v{i}" for i in range(1, k + 1)]
    edges = [("x", f"v{i}") for i in range(1, k + 1)]
    for t, s in enumerate(sets, start=1):
        if not s:
            raise GraphError(f"attachment set {t} is empty")
        if not s <= set(range(1, k + 1)):
            raise GraphError(f"attachment set {t} is not a subset of 1..{k}")
        vs.append(f"y{t}")
        edges.extend((f"y{t}", f"v{j}") for j in sorted(s))
    return LabeledGraph(tuple(vs), tuple(edges))


# ---------------------------------------------------------------- operations


def _fresh(name: str, taken: set) -> str:
    while name in taken:
        name += "'"
    return name


def glue(h1: LabeledGraph, h2: LabeledGraph) -> LabeledGraph:
    """Product in the labeled-graph algebra: identify equally labeled vertices
    and reduce multiple edges."""
    if h1.n_labels != h2.n_labels:
        raise GraphError(f"label counts differ ({h1.n_labels} vs {h2.n_labels})")
    rename = dict(zip(h2.labels, h1.labels))
    taken = set(h1.vertices)
    for v in h2.vertices:
        if v not in rename:
            rename[v] = _fresh(v, taken)
            taken.add(rename[v])
    edges = set(h1.edges)
    for u, v in h2.edges:
        a, b = rename[u], rename[v]
        assert a != b, "gluing produced a loop"
        edges.add(_edge(a, b))
    return LabeledGraph(tuple(taken), tuple(edges), h1.labels)


def reflect(h: LabeledGraph, K: Iterable[str], S: Iterable[str]) -> LabeledGraph:
    """Glue a fresh copy of ``h[K]`` back onto ``h`` along ``S``.

    The copies of the vertices in ``S`` are identified with the originals,
    the vertices of ``K - S`` are duplicated. Labels of ``h`` are kept.
    """
    K, S = set(K), set(S)
    if not K <= set(h.vertices):
        raise GraphError("K is not a subset of the vertex set")
    if not S <= K:
        raise GraphError("S is not a subset of K")
    if not h.is_independent(S):
        raise GraphError("S is not an independent set")
    taken = set(h.vertices)
    copy = {}
    for v in sorted(K):
        if v in S:
            copy[v] = v
        else:
            copy[v] = _fresh(v, taken)
            taken.add(copy[v])
    edges = set(h.edges)
    for u, v in h.edges:
        if u in K and v in K:
            edges.add(_edge(copy[u], copy[v]))
    return LabeledGraph(tuple(taken), tuple(edges), h.labels)


def as_tree_spec(t: LabeledGraph | TreeSpec) -> TreeSpec:
    """Accept a bare tree and label all its vertices in sorted order."""
    if isinstance(t, TreeSpec):
        return t
    if not t.is_tree():
        raise GraphError("graph is not a tree")
    extra = [v for v in t.vertices if v not in t.labels]
    return validate_labeled_tree(t.with_labels(t.labels + tuple(extra)))


def build_reflection_tree(tree: LabeledGraph | TreeSpec,
                          reflections: Iterable[tuple[Iterable[str], Iterable[str]]]) -> LabeledGraph:
    """Apply ``reflect`` for every ``(K, S)`` in turn. Each ``K`` must span a
    subtree of the original tree and ``S`` must be independent in it."""
    spec = as_tree_spec(tree)
    base = spec.graph
    out = base
    for K, S in reflections:
        K, S = set(K), set(S)
        if not K or not K <= set(base.vertices):
            raise GraphError(f"reflection set {sorted(K)} is not a vertex subset of the tree")
        if not base.induced(K).is_tree():
            raise GraphError(f"{sorted(K)} does not induce a subtree")
        if not S <= K or not base.is_independent(S):
            raise GraphError(f"{sorted(S)} is not an independent subset of {sorted(K)}")
        out = reflect(out, K, S)
    return out.with_labels(())


def unlabel(h: LabeledGraph, keep: Iterable[int]) -> LabeledGraph:
    """Keep only the label indices in ``keep`` (1-based), renumbered in order."""
    keep = sorted(set(keep))
    if any(i < 1 or i > h.n_labels for i in keep):
        raise GraphError(f"label indices {keep} out of range 1..{h.n_labels}")
    return h.with_labels(h.labels[i - 1] for i in keep)


def validate_labeled_tree(h: LabeledGraph) -> TreeSpec:
    """TreeSpec of the subgraph induced on the labeled vertices.

    The empty labeling gives the empty tree. Raises GraphError when the
    labeled vertices do not span a tree.
    """
    t = h.induced(h.labels).with_labels(h.labels)
    if h.n_labels and not t.is_tree():
        raise GraphError("labeled vertices do not induce a tree")
    return TreeSpec(t, tuple(t.degree(v) for v in h.labels))


def labeled_tree_key(h: LabeledGraph) -> tuple:
    """The labeled tree in label-index coordinates; equal keys mean the two
    graphs induce the same tree on their labels."""
    idx = {v: i for i, v in enumerate(h.labels, start=1)}
    t = validate_labeled_tree(h)
    return h.n_labels, tuple(sorted(tuple(sorted((idx[u], idx[v]))) for u, v in t.edges))


def star_part(h: LabeledGraph) -> LabeledGraph:
    """``h`` minus the edges of its labeled tree (written H* in the calculus)."""
    return h.without_edges(validate_labeled_tree(h).edges)


# ---------------------------------------------------------------- retracts


@dataclass(frozen=True)
class RetractResult:
    found: bool
    witness: dict | None = None

    def __bool__(self):
        return self.found


def retract_check(h: LabeledGraph, S: Iterable[str]) -> RetractResult:
    """Search for a homomorphism ``h -> h[S]`` that is the identity on ``S``.

    Plain backtracking with forward checking, most constrained vertex first
    (ties by name). Exponential in the worst case.
    """
    S = set(S)
    if not S:
        raise GraphError("S must be non-empty")
    if not S <= set(h.vertices):
        raise GraphError("S is not a vertex subset")
    target = h.induced(S).adjacency
    adj = h.adjacency
    assign = {v: v for v in S}
    domains = {}
    for v in h.vertices:
        if v in S:
            continue
        dom = set(S)
        for w in adj[v]:
            if w in S:
                dom &= target[w]
        domains[v] = dom

    def search(domains):
        if not domains:
            return True
        v = min(domains, key=lambda u: (len(domains[u]), u))
        rest = {u: d for u, d in domains.items() if u != v}
        for a in sorted(domains[v]):
            new = dict(rest)
            ok = True
            for w in adj[v]:
                if w in new:
                    new[w] = new[w] & target[a]
                    if not new[w]:
                        ok = False
                        break
            if ok:
                assign[v] = a
                if search(new):
                    return True
                del assign[v]
        return False

    if any(not d for d in domains.values()):
        return RetractResult(False)
    if search(domains):
        return RetractResult(True, dict(sorted(assign.items())))
    return RetractResult(False)
