"""Randomized suites that turn the calculus' inequalities into falsifiable checks,
plus perturbation scans around constant graphons."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np

from . import corpus
from .calculus import (MARGIN_TOL, MarginReport, blakley_roy_audit, cfs_audit, sidorenko_margin,
                       smoothness_margin, tree_weight)
from .density import degree_function
from .documents import graph_from_doc, graph_to_doc, graphon_from_doc, graphon_to_doc
from .graphon import GraphonError, StepGraphon
from .graphs import GraphError, LabeledGraph, build_cfs_graph, retract_check, unlabel, validate_labeled_tree

FAMILIES = ("blakley-roy", "cfs", "reflection-tree", "edge-glue", "refl-square", "unlabel",
            "edge-smooth", "tree-weight")
DEFAULT_TOL = {"tree-weight": 1e-12}


def random_step_graphon(m: int, seed: int, floor=Fraction(0), max_value=Fraction(1),
                        resolution: int = 60) -> StepGraphon:
    """Entries on the grid floor + (max - floor) * k / resolution, node weights
    proportional to integers in 1..10. Deterministic per seed."""
    floor, max_value = Fraction(floor), Fraction(max_value)
    if m < 1:
        raise GraphonError("m must be positive")
    if floor > max_value or floor < 0:
        raise GraphonError("need 0 <= floor <= max_value")
    rng = np.random.default_rng(seed)
    raw = [int(x) for x in rng.integers(1, 11, size=m)]
    p = tuple(Fraction(x, sum(raw)) for x in raw)
    mat = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        for j in range(i, m):
            k = int(rng.integers(0, resolution + 1))
            mat[i][j] = mat[j][i] = floor + (max_value - floor) * Fraction(k, resolution)
    return StepGraphon(p, tuple(tuple(r) for r in mat))


def trial_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def graphon_corpus(count: int, max_blocks: int, seed: int, floor=Fraction(1, 20)) -> list[StepGraphon]:
    out = []
    for i in range(count):
        s = trial_seed(seed, i)
        m = 1 + int(np.random.default_rng(s).integers(max_blocks))
        out.append(random_step_graphon(m, s, floor))
    return out


def random_tree(n: int, rng) -> LabeledGraph:
    if n == 1:
        return LabeledGraph(("t0",), ())
    if n == 2:
        return corpus.from_nx(nx.path_graph(2))
    seq = [int(x) for x in rng.integers(0, n, size=n - 2)]
    return corpus.from_nx(nx.from_prufer_sequence(seq))


# ---------------------------------------------------------------- suites


@dataclass
class SuiteConfig:
    family: str
    trials: int = 100
    max_blocks: int = 4
    floor: Fraction = Fraction(1, 20)
    seed: int = 0
    tolerance: float | None = None
    graph: LabeledGraph | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        if self.trials < 1:
            raise ValueError("trial count must be at least 1")
        self.floor = Fraction(self.floor)
        if self.floor <= 0:
            raise ValueError("positivity floor must be > 0")
        if self.tolerance is None:
            self.tolerance = DEFAULT_TOL.get(self.family, MARGIN_TOL)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["floor"] = str(self.floor)
        d["graph"] = graph_to_doc(self.graph) if self.graph is not None else None
        return d


@dataclass
class Trial:
    index: int
    seed: int
    params: dict
    graph: dict
    graphon: dict
    report: MarginReport


@dataclass
class SuiteReport:
    family: str
    config: dict
    trials: list
    min_margin: float
    failures: list = field(default_factory=list)
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures


def _params(family: str, rng, cfg: SuiteConfig):
    """Pick the graph (and extra parameters) for one trial."""
    if family == "blakley-roy":
        n = 1 + int(rng.integers(5))
        return {"n": n}, None
    if family == "cfs":
        k = 1 + int(rng.integers(3))
        subsets = [s for s in range(1, 2**k)]
        sets = [[j + 1 for j in range(k) if s >> j & 1]
                for s in (subsets[int(i)] for i in rng.integers(len(subsets), size=int(rng.integers(4))))]
        return {"k": k, "attach_sets": sets}, build_cfs_graph(k, sets)
    if family == "reflection-tree":
        items = corpus.reflection_tree_corpus()
        return {}, items[int(rng.integers(len(items)))]
    if family == "edge-glue":
        items = corpus.edge_glue_corpus()
        return {}, items[int(rng.integers(len(items)))]
    if family == "refl-square":
        trees = [t for t in corpus.small_trees(6) if len(t.vertices) > 1]
        t = trees[int(rng.integers(len(trees)))]
        sets = corpus.independent_sets(t)
        return {}, corpus.refl_square(t, sets[int(rng.integers(len(sets)))])
    if family == "unlabel":
        items = corpus.smooth_corpus()
        h = items[int(rng.integers(len(items)))]
        tree = validate_labeled_tree(h).graph
        subs = corpus.subtrees(tree, len(tree.vertices))
        keep = subs[int(rng.integers(len(subs)))]
        return {}, unlabel(h, [h.labels.index(v) + 1 for v in keep])
    if family == "edge-smooth":
        h = cfg.graph
        if h is None:
            basics = corpus.sidorenko_basics()
            h = basics[int(rng.integers(len(basics)))]
        if not h.is_bipartite():
            raise GraphError("edge-smooth needs a bipartite (Sidorenko) graph")
        e = h.edges[int(rng.integers(h.n_edges))]
        return {}, h.with_labels(e)
    if family == "tree-weight":
        t = random_tree(1 + int(rng.integers(7)), rng)
        order = list(t.vertices)
        rng.shuffle(order)
        return {}, t.with_labels(order)
    raise ValueError(f"unknown family {family!r}")


def evaluate(family: str, params: dict, graph: LabeledGraph | None, W: StepGraphon) -> MarginReport:
    """The check behind one trial; also used to replay stored instances."""
    if family == "blakley-roy":
        return _audit_report(blakley_roy_audit(params["n"], W))
    if family == "cfs":
        return _audit_report(cfs_audit(params["k"], params["attach_sets"], W))
    if family in ("reflection-tree", "edge-glue"):
        return sidorenko_margin(graph, W)
    if family in ("refl-square", "unlabel", "edge-smooth"):
        return smoothness_margin(graph, W)
    if family == "tree-weight":
        fw = tree_weight(graph, W)
        e = fw.expectation()
        dev = abs(float(e - 1))
        deg = degree_function(W).values
        for v in fw.variables:
            cond = fw.conditional(v).values
            dev = max(dev, max(abs(float(c - x / fw.d)) for c, x in zip(cond, deg)))
        return MarginReport("tree-weight", float(e), 1.0, -dev, exact={"E(f_T)": e})
    raise ValueError(f"unknown family {family!r}")


def _audit_report(audit) -> MarginReport:
    ineq = [s.margin for s in audit.steps if s.kind == "inequality"]
    ident = max((abs(s.margin) for s in audit.steps if s.kind == "identity"), default=0.0)
    margin = min([audit.final_margin] + ineq)
    if ident > 1e-10 or abs(audit.chain_residual) > MARGIN_TOL:
        margin = float("-inf")
    return MarginReport(audit.kind + "-audit", audit.final_margin, 0.0, margin,
                        exact={"max_identity_residual": ident}, digest=audit.digest)


def run_suite(cfg: SuiteConfig) -> SuiteReport:
    start = time.perf_counter()
    trials, failures = [], []
    for i in range(cfg.trials):
        s = trial_seed(cfg.seed, i)
        rng = np.random.default_rng(s)
        params, graph = _params(cfg.family, rng, cfg)
        W = random_step_graphon(1 + int(rng.integers(cfg.max_blocks)), int(rng.integers(2**31)), cfg.floor)
        rep = evaluate(cfg.family, params, graph, W)
        trial = Trial(i, s, params, graph_to_doc(graph) if graph is not None else None, graphon_to_doc(W), rep)
        trials.append(trial)
        if rep.margin < -cfg.tolerance and not rep.violated:
            failures.append(i)
    min_margin = min(t.report.margin for t in trials)
    return SuiteReport(cfg.family, cfg.to_dict(), trials, min_margin, failures,
                       time.perf_counter() - start)


def replay(family: str, trial: Trial) -> MarginReport:
    graph = graph_from_doc(trial.graph) if trial.graph is not None else None
    return evaluate(family, trial.params, graph, graphon_from_doc(trial.graphon))


# ---------------------------------------------------------------- perturbations


def random_direction(m: int, seed: int, node_weights=None, degree_regular: bool = False,
                     resolution: int = 12) -> list[list[Fraction]]:
    """Random symmetric rational matrix with zero mean under the node weights,
    scaled to max |entry| = 1. ``degree_regular`` also zeroes every row mean."""
    p = [Fraction(x) for x in (node_weights or [Fraction(1, m)] * m)]
    rng = np.random.default_rng(seed)
    while True:
        D = [[Fraction(0)] * m for _ in range(m)]
        for i in range(m):
            for j in range(i, m):
                D[i][j] = D[j][i] = Fraction(int(rng.integers(-resolution, resolution + 1)), resolution)
        row = [sum(p[j] * D[i][j] for j in range(m)) for i in range(m)]
        mean = sum(p[i] * row[i] for i in range(m))
        if degree_regular:
            D = [[D[i][j] - row[i] - row[j] + mean for j in range(m)] for i in range(m)]
        else:
            D = [[D[i][j] - mean for j in range(m)] for i in range(m)]
        scale = max(abs(x) for r in D for x in r)
        if scale:
            return [[x / scale for x in r] for r in D]


def perturbation_scan(H: LabeledGraph, base, direction, epsilons, node_weights=None) -> list[MarginReport]:
    """Sidorenko margins along W = base + eps * direction.

    ``direction`` must be symmetric with zero mean under the node weights, so
    every W on the line has edge density exactly ``base``.
    """
    base = Fraction(base)
    if base <= 0:
        raise GraphonError("base must be positive")
    D = [[Fraction(x) for x in r] for r in direction]
    m = len(D)
    p = [Fraction(x) for x in (node_weights or [Fraction(1, m)] * m)]
    if sum(p[i] * p[j] * D[i][j] for i in range(m) for j in range(m)) != 0:
        raise GraphonError("direction does not have zero mean")
    out = []
    for eps in epsilons:
        e = Fraction(str(eps)) if isinstance(eps, float) else Fraction(eps)
        mat = [[base + e * x for x in r] for r in D]
        if any(x < 0 for r in mat for x in r):
            raise GraphonError(f"perturbed graphon has a negative entry at eps={eps}")
        W = StepGraphon(tuple(p), tuple(tuple(r) for r in mat))
        rep = sidorenko_margin(H, W)
        assert rep.exact["d"] == base
        rep.exact["eps"] = e
        if e:
            rep.exact["margin/eps^2"] = rep.margin / float(e) ** 2
        out.append(rep)
    return out


@dataclass
class ProbeReport:
    min_margin: float
    margins: list
    negative: int
    sidorenko_min: float


def retract_smoothness_probe(H: LabeledGraph, trials: int, seed: int = 0, max_blocks: int = 3) -> ProbeReport:
    """Smallest smoothness margin of the labeled tree of H over random positive
    graphons. Exploratory: a negative value is evidence about the
    retract/smoothness question, not a failure."""
    validate_labeled_tree(H)
    if not H.labels or not retract_check(H, H.labels):
        raise GraphError("labeled tree is not a retract")
    graphons = graphon_corpus(trials, max_blocks, seed)
    sid = min(sidorenko_margin(H.with_labels(()), W).margin for W in graphons)
    if sid < -MARGIN_TOL:
        raise GraphError("graph fails the Sidorenko inequality on the probe corpus")
    margins = [smoothness_margin(H, W).margin for W in graphons]
    return ProbeReport(min(margins), margins, sum(m < -MARGIN_TOL for m in margins), sid)
