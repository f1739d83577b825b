"""Logarithmic calculus over step graphons.

Densities stay exact; the only inexact step is the logarithm, taken in
96-bit binary floating point via mpmath. Quantities whose defining formula
divides by zero are set to 0, and ``0 ln 0 = 0``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import mpmath
import networkx as nx
import numpy as np

from . import documents
from .density import (BlockTable, conditional_expectation, contract, degree_function,
                      edge_density, hom_density_elimination, restricted_density)
from .graphon import StepGraphon
from .graphs import (GraphError, LabeledGraph, TreeSpec, build_cfs_graph, build_path,
                     glue, labeled_tree_key, retract_check, validate_labeled_tree)

mp = mpmath.MPContext()
mp.prec = 96

IDENTITY_TOL = 1e-10
MARGIN_TOL = 1e-9


def ln(x: Fraction):
    x = Fraction(x)
    if x <= 0:
        raise ValueError(f"log of non-positive value {x}")
    return mp.log(mp.mpf(x.numerator) / x.denominator)


def xlnx(x: Fraction):
    return mp.zero if x == 0 else mp.mpf(x.numerator) / x.denominator * ln(x)


def _mpf(x: Fraction):
    x = Fraction(x)
    return mp.mpf(x.numerator) / x.denominator


def zpow(x: Fraction, e: int) -> Fraction:
    """``x ** e`` with undefined values (negative power of 0) replaced by 0."""
    if e < 0 and x == 0:
        return Fraction(0)
    return Fraction(x) ** e


_zpow = np.frompyfunc(zpow, 2, 1)


def _weights(W: StepGraphon, k: int) -> np.ndarray:
    """Product measure of ``k`` block variables as a dense table."""
    out = np.array(Fraction(1), dtype=object)
    for _ in range(k):
        out = np.multiply.outer(out, W.p)
    return out


# ---------------------------------------------------------------- tree weights


@dataclass(frozen=True, eq=False)
class TreeWeight:
    """The weight f_T of a tree in a graphon, kept in factored form.

    ``f_T = scale * prod(unary factors) * prod(W over tree edges)``. With node
    weights attached it is the probability distribution mu_T.
    """

    tree: TreeSpec
    graphon: StepGraphon
    d: Fraction
    factors: tuple
    scale: Fraction

    @property
    def variables(self) -> tuple[str, ...]:
        return self.tree.variables

    @cached_property
    def table(self) -> BlockTable:
        vals = contract(self.factors, self.variables, self.graphon.m) * self.scale
        return BlockTable(self.variables, np.asarray(vals, dtype=object))

    @cached_property
    def support(self) -> frozenset:
        return frozenset(idx for idx, v in self.table.items() if v > 0)

    def marginal(self, variables: Sequence[str]) -> BlockTable:
        """Marginal of mu_T on ``variables`` (node weights included)."""
        variables = tuple(variables)
        facs = list(self.factors) + [((v,), self.graphon.p) for v in self.variables]
        vals = contract(facs, variables, self.graphon.m) * self.scale
        return BlockTable(variables, np.asarray(vals, dtype=object))

    def expectation(self) -> Fraction:
        return self.marginal(()).values[()]

    def conditional(self, var: str) -> BlockTable:
        """E_{x}(f_T) as a function of the single variable ``var``."""
        marg = self.marginal((var,))
        return BlockTable((var,), marg.values / self.graphon.p)


def tree_weight(T: TreeSpec | LabeledGraph, W: StepGraphon) -> TreeWeight:
    if isinstance(T, LabeledGraph):
        T = validate_labeled_tree(T)
    d = edge_density(W).value
    if d == 0:
        raise ValueError("edge density is 0; tree weights are undefined")
    if not len(T):
        # empty tree: the weight is the constant 1
        return TreeWeight(T, W, d, (), Fraction(1))
    deg = degree_function(W).values
    factors = []
    for v, r in zip(T.variables, T.degrees):
        factors.append(((v,), _zpow(deg, 1 - r)))
    factors += [((u, v), W.w) for u, v in T.edges]
    return TreeWeight(T, W, d, tuple(factors), 1 / d)


def mu_t_sample(fw: TreeWeight, seed: int, count: int) -> np.ndarray:
    """Draw ``count`` block tuples from mu_T (columns in ``fw.variables`` order).

    A random edge is chosen with probability proportional to p_i p_j W(i, j),
    then the remaining vertices are attached breadth-first, each new vertex
    going to block j with probability p_j W(parent, j) / d(parent).
    """
    W = fw.graphon
    n, m = len(fw.variables), W.m
    rng = np.random.default_rng(seed)
    out = np.zeros((count, n), dtype=np.intp)
    if n == 0 or count == 0:
        return out
    p = np.array([float(x) for x in W.node_weights])
    w = np.array([[float(x) for x in row] for row in W.matrix])
    col = {v: i for i, v in enumerate(fw.variables)}
    adj = fw.tree.graph.adjacency
    if n == 1:
        probs = p * (w @ p)
        if probs.sum() <= 0:
            raise ValueError("mu_T has zero mass")
        out[:, 0] = rng.choice(m, size=count, p=probs / probs.sum())
        return out
    root = fw.variables[0]
    other = min(adj[root], key=fw.variables.index)
    pair = np.outer(p, p) * w
    if pair.sum() <= 0:
        raise ValueError("mu_T has zero mass")
    e = rng.choice(m * m, size=count, p=(pair / pair.sum()).ravel())
    out[:, col[root]], out[:, col[other]] = np.divmod(e, m)
    trans = w * p[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        trans = trans / trans.sum(axis=1, keepdims=True)
    cum = np.cumsum(np.nan_to_num(trans), axis=1)
    placed, queue = {root, other}, [root, other]
    while queue:
        u = queue.pop(0)
        for v in sorted(adj[u], key=fw.variables.index):
            if v in placed:
                continue
            parent = out[:, col[u]]
            r = rng.random(count)
            out[:, col[v]] = np.minimum((r[:, None] >= cum[parent]).sum(axis=1), m - 1)
            placed.add(v)
            queue.append(v)
    return out


# ---------------------------------------------------------------- margins


@dataclass
class MarginReport:
    """``lhs >= rhs`` checked as ``margin = lhs - rhs``.

    A support violation (log of 0 at a point of positive weight) makes
    ``lhs`` and ``margin`` equal to -inf.
    """

    kind: str
    lhs: float
    rhs: float
    margin: float
    support_violation: list = field(default_factory=list)
    violation_vars: tuple = ()
    retract: bool | None = None
    exact: dict = field(default_factory=dict)
    digest: str = ""

    @property
    def violated(self) -> bool:
        return bool(self.support_violation)

    def passed(self, tol: float = MARGIN_TOL) -> bool:
        return not self.violated and self.margin >= -tol


def _mean_log(mu: np.ndarray, vals: np.ndarray):
    """sum(mu * ln vals) over mu > 0, plus the indices where vals vanish there."""
    total, bad = mp.zero, []
    for idx in np.ndindex(mu.shape):
        w = mu[idx]
        if w == 0:
            continue
        if vals[idx] == 0:
            bad.append(tuple(int(i) for i in idx))
            continue
        total += _mpf(w) * ln(vals[idx])
    return total, bad


def _inputs_digest(H, W):
    return documents.digest(documents.graph_to_doc(H), documents.graphon_to_doc(W))


def smoothness_terms(H: LabeledGraph, W: StepGraphon):
    """Pieces of the smoothness inequality for the labeled tree of ``H``.

    Returns ``(fw, hstar, active, mu, t)``: ``t`` is t_S(H*, W) on the labeled
    vertices that H* actually touches, ``mu`` the mu_T marginal there.
    """
    tree = validate_labeled_tree(H)
    hstar = H.without_edges(tree.edges)
    active = tuple(v for v in H.labels if hstar.degree(v) > 0)
    fw = tree_weight(tree, W)
    mu = fw.marginal(active).values
    if active:
        t = restricted_density(hstar.with_labels(active), W).values
    else:
        t = np.array(hom_density_elimination(hstar, W).value, dtype=object)
    return fw, hstar, active, mu, t


def smoothness_margin(H: LabeledGraph, W: StepGraphon) -> MarginReport:
    """E(f_T ln t_S(H*, W)) against |E(H*)| ln d for the labeled tree T of H."""
    fw, hstar, active, mu, t = smoothness_terms(H, W)
    d = fw.d
    lhs, bad = _mean_log(mu, t)
    rhs = hstar.n_edges * ln(d)
    rep = MarginReport("smoothness", float(lhs), float(rhs), float(lhs - rhs),
                       exact={"d": d}, digest=_inputs_digest(H, W))
    if bad:
        rep.support_violation, rep.violation_vars = bad, active
        rep.lhs = rep.margin = float("-inf")
        rep.retract = bool(retract_check(H, H.labels)) if H.labels else None
    return rep


def sidorenko_margin(H: LabeledGraph, W: StepGraphon) -> MarginReport:
    """ln t(H, W) against |E(H)| ln d."""
    d = edge_density(W).value
    if d == 0:
        raise ValueError("edge density is 0")
    t = hom_density_elimination(H, W).value
    rhs = H.n_edges * ln(d)
    rep = MarginReport("sidorenko", float("-inf"), float(rhs), float("-inf"),
                       exact={"t": t, "d": d}, digest=_inputs_digest(H, W))
    if t > 0:
        lhs = ln(t)
        rep.lhs, rep.margin = float(lhs), float(lhs - rhs)
    return rep


# ---------------------------------------------------------------- audits


@dataclass
class Step:
    name: str
    kind: str  # "identity" or "inequality"
    lhs: float
    rhs: float
    margin: float
    chain: bool = False

    def passed(self, identity_tol=IDENTITY_TOL, margin_tol=MARGIN_TOL) -> bool:
        if self.kind == "identity":
            return abs(self.margin) <= identity_tol
        return self.margin >= -margin_tol


def _step(name, kind, lhs, rhs, chain=False):
    return Step(name, kind, float(lhs), float(rhs), float(mp.mpf(lhs) - mp.mpf(rhs)), chain)


@dataclass
class AuditReport:
    """Step-by-step replay of a Jensen-inequality proof chain.

    The chain inequality margins add up to ``final_margin``; the difference
    is kept as ``chain_residual``.
    """

    kind: str
    params: dict
    steps: list
    final_margin: float
    chain_residual: float
    tables: dict = field(default_factory=dict)
    digest: str = ""

    def failed_steps(self, identity_tol=IDENTITY_TOL, margin_tol=MARGIN_TOL):
        return [s for s in self.steps if not s.passed(identity_tol, margin_tol)]

    def passed(self, identity_tol=IDENTITY_TOL, margin_tol=MARGIN_TOL) -> bool:
        return (not self.failed_steps(identity_tol, margin_tol)
                and self.final_margin >= -margin_tol and abs(self.chain_residual) <= margin_tol)

    @property
    def q(self):
        return self.tables.get("q")

    @property
    def s(self):
        return [v for k, v in sorted(self.tables.items()) if k.startswith("s")]

    @property
    def h(self):
        return [v for k, v in sorted(self.tables.items()) if k.startswith("h")]


def _expect_log(W, weight: np.ndarray, vals: np.ndarray):
    """E(weight * ln vals) over a product of block variables; 0 where weight is 0."""
    total = mp.zero
    measure = _weights(W, weight.ndim)
    for idx in np.ndindex(weight.shape):
        if weight[idx] == 0:
            continue
        total += _mpf(measure[idx] * weight[idx]) * ln(vals[idx])
    return total


def _expect(W, vals: np.ndarray) -> Fraction:
    return (vals * _weights(W, vals.ndim)).sum()


def blakley_roy_audit(n_edges: int, W: StepGraphon) -> AuditReport:
    """Replay of t(P_n, W) >= d^n: one ln-Jensen step over the path weight
    and one z ln z step per interior vertex."""
    path = build_path(n_edges)
    path = path.with_labels(f"p{i}" for i in range(n_edges + 1))
    fw = tree_weight(path, W)
    d = fw.d
    t = hom_density_elimination(path, W).value
    deg = degree_function(W).values
    zlnz = sum((_mpf(p) * xlnx(x) for p, x in zip(W.node_weights, deg)), mp.zero) / _mpf(d)
    steps = [_step("E(f) = 1", "identity", _mpf(fw.expectation()), 1)]
    interior = path.labels[1:-1]
    logs = []
    for v in interior:
        marg = fw.marginal((v,)).values
        e = _expect_log_marg(marg, deg)
        logs.append(e)
        steps.append(_step(f"E(f ln d({v})) = E(d ln d)/d", "identity", e, zlnz))
    jensen_rhs = ln(d) + sum(logs, mp.zero)
    steps.insert(1, _step("ln t(P_n) >= ln d + sum E(f ln d(x_i))", "inequality", ln(t), jensen_rhs, True))
    for v in interior:
        steps.append(_step(f"E(d ln d)/d >= ln d  [{v}]", "inequality", zlnz, ln(d), True))
    final = ln(t) - n_edges * ln(d)
    chain = sum((mp.mpf(s.lhs) - mp.mpf(s.rhs) for s in steps if s.chain), mp.zero)
    return AuditReport("blakley-roy", {"n": n_edges}, steps, float(final), float(final - chain),
                       {"d(x)": BlockTable(("x",), deg)}, _inputs_digest(path, W))


def _expect_log_marg(marg: np.ndarray, vals: np.ndarray):
    total = mp.zero
    for idx in np.ndindex(marg.shape):
        if marg[idx] != 0:
            total += _mpf(marg[idx]) * ln(vals[idx])
    return total


def cfs_audit(k: int, attach_sets: Iterable[Iterable[int]], W: StepGraphon) -> AuditReport:
    """Replay of t(H, W) >= d^e for the graph with x joined to v_1..v_k and
    y_t joined to S_t, through the tables q, s_t, f, f_t, h_t."""
    sets = [tuple(sorted(set(s))) for s in attach_sets]
    H = build_cfs_graph(k, sets)
    d = edge_density(W).value
    if d <= 0:
        raise ValueError("edge density is 0")
    m = W.m
    xs = ("x",) + tuple(f"v{i}" for i in range(1, k + 1))
    q1 = degree_function(W).values
    q = contract([(("x",), q1)], xs, m)
    prod_w = contract([(("x", f"v{i}"), W.w) for i in range(1, k + 1)], xs, m)
    f = prod_w * _zpow(q, 1 - k) / d
    t = hom_density_elimination(H, W).value
    tables = {"q": BlockTable(("x",), q1)}

    s_full, f_t, h_t = [], [], []
    for i, S in enumerate(sets, start=1):
        star = LabeledGraph.from_edges([("z", f"v{j}") for j in S], labels=[f"v{j}" for j in S])
        s_tab = restricted_density(star, W)
        tables[f"s{i}"] = s_tab
        s = contract([(s_tab.variables, s_tab.values)], xs, m)
        a = len(S)
        s_full.append(s)
        f_t.append(_zpow(s, -1) * _zpow(q, a - k) * prod_w)
        h = s * _zpow(q, 1 - a)
        h_t.append(h)
        tables[f"h{i}"] = BlockTable(xs, h)

    steps = []
    chain_start = f * _zpow(q, k - 1) * d
    for s in s_full:
        chain_start = chain_start * s
    steps.append(_step("t(H) = E(f q^(k-1) d prod s_t)", "identity", _mpf(t), _mpf(_expect(W, chain_start))))
    steps.append(_step("E(f) = 1", "identity", _mpf(_expect(W, f)), 1))
    for i, (ft, h) in enumerate(zip(f_t, h_t), start=1):
        steps.append(_step(f"E(f_{i}) = 1", "identity", _mpf(_expect(W, ft)), 1))
        cond = conditional_expectation(BlockTable(xs, ft * h), ("x",), W).values
        dev = max(abs(c - qq) for c, qq in zip(cond, q1))
        steps.append(_step(f"E_x(f_{i} h_{i}) = q", "identity", _mpf(dev), 0))
        steps.append(_step(f"E(f_{i} h_{i}) = d", "identity", _mpf(_expect(W, ft * h)), _mpf(d)))

    ln_d = ln(d)
    e_f_ln_q = _expect_log(W, f, q)
    e_qlnq = sum((_mpf(p) * xlnx(x) for p, x in zip(W.node_weights, q1)), mp.zero)
    e_f_ln_s = [_expect_log(W, f, s) for s in s_full]
    jensen_rhs = (k - 1) * e_f_ln_q + ln_d + sum(e_f_ln_s, mp.zero)
    steps.append(_step("ln t(H) >= E(f ln(q^(k-1) d prod s_t))", "inequality", ln(t), jensen_rhs, True))
    steps.append(_step("E(f ln q) = E(q ln q)/d", "identity", e_f_ln_q, e_qlnq / _mpf(d)))
    steps.append(_step("E(f ln d) = ln d", "identity", _expect_log(W, f, np.full(f.shape, d, dtype=object)), ln_d))
    steps.append(_step("(k-1) E(q ln q)/d >= (k-1) ln d", "inequality",
                       (k - 1) * e_qlnq / _mpf(d), (k - 1) * ln_d, True))
    for i, (S, ft, h, els) in enumerate(zip(sets, f_t, h_t, e_f_ln_s), start=1):
        a = len(S)
        fh = ft * h
        e_hlnh = _expect_log(W, fh, h)
        steps.append(_step(f"E(f ln s_{i}) = (E(f_{i} h_{i} ln h_{i}) + (a-1) E(q ln q))/d", "identity",
                           els, (e_hlnh + (a - 1) * e_qlnq) / _mpf(d)))
        steps.append(_step(f"E(f_{i} h_{i} ln h_{i})/d >= ln d", "inequality", e_hlnh / _mpf(d), ln_d, True))
        steps.append(_step(f"(a_{i}-1) E(q ln q)/d >= (a_{i}-1) ln d", "inequality",
                           (a - 1) * e_qlnq / _mpf(d), (a - 1) * ln_d, True))
        steps.append(_step(f"E(f ln s_{i}) >= a_{i} ln d", "inequality", els, a * ln_d))
    e = H.n_edges
    final = ln(t) - e * ln_d
    chain = sum((mp.mpf(s.lhs) - mp.mpf(s.rhs) for s in steps if s.chain), mp.zero)
    return AuditReport("cfs", {"k": k, "attach_sets": [list(s) for s in sets]}, steps,
                       float(final), float(final - chain), tables, _inputs_digest(H, W))


# ---------------------------------------------------------------- forcing, gluing


class Verdict(str, enum.Enum):
    CONSISTENT = "CONSISTENT"
    STRICT = "STRICT"
    VIOLATION = "VIOLATION"


@dataclass
class ForcingResult:
    verdict: Verdict
    margin: float
    deviation: float


def forcing_check(H: LabeledGraph, W: StepGraphon, tol: float = MARGIN_TOL) -> ForcingResult:
    """Near-equality in the Sidorenko inequality must come with a near-constant W.

    Numerical surrogate for the equality statement: equality is ``|margin| <= tol``
    and constancy is ``max |W(i, j) - d| <= tol``.
    """
    if not H.is_bipartite():
        raise GraphError("forcing check needs a bipartite graph")
    comps = nx.number_connected_components(H.to_networkx())
    if H.n_edges == len(H.vertices) - comps:
        raise GraphError("graph is a tree (or forest); trees are never forcing")
    rep = sidorenko_margin(H, W)
    d = rep.exact["d"]
    dev = float(max(abs(x - d) for row in W.matrix for x in row))
    if rep.margin > tol:
        v = Verdict.STRICT
    elif rep.margin >= -tol and dev <= tol:
        v = Verdict.CONSISTENT
    else:
        v = Verdict.VIOLATION
    return ForcingResult(v, rep.margin, dev)


@dataclass
class AdditivityReport:
    first: MarginReport
    second: MarginReport
    glued: MarginReport
    lhs_residual: float
    margin_residual: float

    def passed(self, tol: float = MARGIN_TOL) -> bool:
        return abs(self.lhs_residual) <= tol and abs(self.margin_residual) <= tol


def smoothness_additivity_check(H1: LabeledGraph, H2: LabeledGraph, W: StepGraphon) -> AdditivityReport:
    """Smoothness left-hand sides add up under gluing along a common labeled tree."""
    if labeled_tree_key(H1) != labeled_tree_key(H2):
        raise GraphError("the two graphs induce different labeled trees")
    r1, r2 = smoothness_margin(H1, W), smoothness_margin(H2, W)
    rg = smoothness_margin(glue(H1, H2), W)
    if rg.violated or r1.violated or r2.violated:
        same = rg.violated == (r1.violated or r2.violated)
        res = 0.0 if same else float("nan")
        return AdditivityReport(r1, r2, rg, res, res)
    return AdditivityReport(r1, r2, rg, rg.lhs - (r1.lhs + r2.lhs), rg.margin - (r1.margin + r2.margin))


def smoothness_monte_carlo(H: LabeledGraph, W: StepGraphon, seed: int, count: int):
    """Estimate the smoothness lhs by sampling mu_T.

    Returns ``(mean, standard_error, exact_lhs)``.
    """
    fw, hstar, active, mu, t = smoothness_terms(H, W)
    exact, bad = _mean_log(mu, t)
    if bad:
        raise ValueError("log argument vanishes on the support of mu_T")
    logt = np.full(t.shape, -np.inf)
    for idx in np.ndindex(t.shape):
        if t[idx] > 0:
            logt[idx] = float(ln(t[idx]))
    if not active:
        # the integrand is a constant: the estimate is exact
        return float(exact), 0.0, float(exact)
    sample = mu_t_sample(fw, seed, count)
    cols = [fw.variables.index(v) for v in active]
    vals = logt[tuple(sample[:, c] for c in cols)]
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / np.sqrt(count)) if count > 1 else float("inf")
    return mean, se, float(exact)
