"""Homomorphism densities over step graphons.

Two independent evaluators: ``hom_density`` enumerates every block assignment,
``hom_density_elimination`` sums vertices out one at a time. Both work on the
integer form of the graphon (common denominators pulled out) so results are
exact rationals.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .graphon import StepGraphon
from .graphs import LabeledGraph

_INT64_SAFE = 2**62


@dataclass(frozen=True, eq=False)
class BlockTable:
    """A function of ``len(variables)`` block indices, stored densely.

    ``exact`` tables hold Fractions; approximate ones hold floats or mpf.
    """

    variables: tuple[str, ...]
    values: np.ndarray
    exact: bool = True

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate table variables")
        if self.values.ndim != len(self.variables):
            raise ValueError(f"table of arity {len(self.variables)} has {self.values.ndim} axes")

    @property
    def arity(self) -> int:
        return len(self.variables)

    def __getitem__(self, key):
        return self.values[key]

    def expectation(self, W: StepGraphon):
        return conditional_expectation(self, (), W).values[()]

    def items(self):
        for idx in product(*(range(s) for s in self.values.shape)):
            yield idx, self.values[idx]

    def equals(self, other: BlockTable) -> bool:
        return (self.variables == other.variables and self.values.shape == other.values.shape
                and all(a == b for a, b in zip(self.values.flat, other.values.flat)))

    def __repr__(self):
        return f"BlockTable(vars={self.variables}, shape={self.values.shape}, exact={self.exact})"


@dataclass(frozen=True)
class DensityValue:
    value: Fraction
    method: str

    def __float__(self):
        return float(self.value)


# ---------------------------------------------------------------- contraction


def _einsum(factors, out_vars):
    scalars = [a for v, a in factors if not v]
    tensors = [(v, a) for v, a in factors if v]
    letters = {}
    for v, _ in tensors:
        for x in v:
            letters.setdefault(x, string.ascii_letters[len(letters)])
    if tensors:
        spec = ",".join("".join(letters[x] for x in v) for v, _ in tensors)
        spec += "->" + "".join(letters[x] for x in out_vars)
        res = np.einsum(spec, *(a for _, a in tensors))
    else:
        res = None
    for s in scalars:
        s = s[()] if isinstance(s, np.ndarray) else s
        res = s if res is None else res * s
    if not isinstance(res, np.ndarray):
        res = np.array(res, dtype=object)
    return res


def boundary(factors, v) -> tuple[str, ...]:
    seen = []
    for vars_, _ in factors:
        if v in vars_:
            for x in vars_:
                if x != v and x not in seen:
                    seen.append(x)
    return tuple(seen)


def greedy_order(factors, eliminate: Iterable[str]) -> list[str]:
    """Minimum-boundary elimination order, ties broken by variable name."""
    scope = [set(v) for v, _ in factors]
    left = set(eliminate)
    order = []
    while left:
        def cost(v):
            b = set().union(*(s for s in scope if v in s)) - {v}
            return len(b), v
        v = min(left, key=cost)
        merged = set().union(*(s for s in scope if v in s)) - {v}
        scope = [s for s in scope if v not in s] + [merged]
        order.append(v)
        left.remove(v)
    return order


def contract(factors: Sequence[tuple[Sequence[str], np.ndarray]], keep: Sequence[str], m: int,
             order: Sequence[str] | None = None) -> np.ndarray:
    """Sum the product of ``factors`` over every variable not in ``keep``.

    Returns an array with one axis per ``keep`` variable in that order.
    Variables in ``keep`` that no factor mentions are broadcast.
    """
    factors = [(tuple(v), np.asarray(a) if isinstance(a, np.ndarray) else np.array(a, dtype=object))
               for v, a in factors]
    keep = tuple(keep)
    allvars = []
    for v, _ in factors:
        allvars.extend(x for x in v if x not in allvars)
    elim = [x for x in allvars if x not in keep]
    if order is None:
        order = greedy_order(factors, elim)
    else:
        order = [x for x in order if x in elim]
        if set(order) != set(elim):
            raise ValueError("elimination order does not cover the summed variables")
    for v in order:
        group = [f for f in factors if v in f[0]]
        rest = [f for f in factors if v not in f[0]]
        out = boundary(group, v)
        factors = rest + [(out, _einsum(group, out))]
    dtype = next((a.dtype for _, a in factors), np.dtype(object))
    for x in keep:
        if not any(x in v for v, _ in factors):
            factors.append(((x,), np.ones(m, dtype=dtype)))
    if not factors:
        return np.array(1, dtype=object)
    return _einsum(factors, keep)


def _pick_dtype(P, N, n_vertices, n_edges, m):
    pmax = max(int(x) for x in P)
    nmax = max(max(int(x) for x in N.flat), 1)
    bound = (pmax * m) ** n_vertices * nmax ** n_edges
    return np.int64 if bound < _INT64_SAFE else object


def _to_fractions(arr: np.ndarray, den: int) -> np.ndarray:
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = Fraction(int(arr[idx]), den)
    return out


# ---------------------------------------------------------------- densities


@lru_cache(maxsize=64)
def _assignments(m: int, n: int) -> np.ndarray:
    """All m**n block assignments, one row per vertex."""
    out = np.indices((m,) * n, dtype=np.intp).reshape(n, -1)
    out.flags.writeable = False
    return out


def hom_density(H: LabeledGraph, W: StepGraphon) -> DensityValue:
    """Exact t(H, W) by enumerating all ``m ** |V(H)|`` block assignments."""
    n, e = len(H.vertices), H.n_edges
    if n == 0:
        return DensityValue(Fraction(1), "brute-force")
    P, pden, N, wden = W.scaled
    dtype = _pick_dtype(P, N, n, e, W.m)
    P, N = P.astype(dtype), N.astype(dtype)
    idx = {v: i for i, v in enumerate(H.vertices)}
    assign = _assignments(W.m, n)
    vals = np.prod(P[assign], axis=0)
    flat = N.ravel()
    for u, v in H.edges:
        vals = vals * flat[assign[idx[u]] * W.m + assign[idx[v]]]
    total = int(vals.sum())
    return DensityValue(Fraction(total, pden**n * wden**e), "brute-force")


def _hom_factors(H, W, dtype, weighted):
    P, _, N, _ = W.scaled
    P, N = P.astype(dtype), N.astype(dtype)
    factors = [((v,), P) for v in H.vertices if v in weighted]
    factors += [((u, v), N) for u, v in H.edges]
    return factors


def hom_density_elimination(H: LabeledGraph, W: StepGraphon,
                            order: Sequence[str] | None = None) -> DensityValue:
    n, e = len(H.vertices), H.n_edges
    P, pden, N, wden = W.scaled
    dtype = _pick_dtype(P, N, n, e, W.m)
    factors = _hom_factors(H, W, dtype, set(H.vertices))
    total = contract(factors, (), W.m, order)
    return DensityValue(Fraction(int(total[()]), pden**n * wden**e), "elimination")


def restricted_density(H: LabeledGraph, W: StepGraphon,
                       order: Sequence[str] | None = None) -> BlockTable:
    """t_S(H, W): the labeled vertices are held fixed, the rest integrated out."""
    if H.n_labels == 0:
        raise ValueError("restricted density needs at least one label; use hom_density")
    free = [v for v in H.vertices if v not in H.labels]
    P, pden, N, wden = W.scaled
    dtype = _pick_dtype(P, N, len(H.vertices), H.n_edges, W.m)
    factors = _hom_factors(H, W, dtype, set(free))
    raw = contract(factors, H.labels, W.m, order)
    return BlockTable(H.labels, _to_fractions(raw, pden ** len(free) * wden ** H.n_edges))


def degree_function(W: StepGraphon, var: str = "x") -> BlockTable:
    """d(x) = E_x W(x, y)."""
    vals = np.array([sum((W.node_weights[j] * W.matrix[i][j] for j in range(W.m)), Fraction(0))
                     for i in range(W.m)], dtype=object)
    return BlockTable((var,), vals)


def edge_density(W: StepGraphon) -> DensityValue:
    d = sum((W.node_weights[i] * W.node_weights[j] * W.matrix[i][j]
             for i in range(W.m) for j in range(W.m)), Fraction(0))
    return DensityValue(d, "direct")


def conditional_expectation(g: BlockTable, S: Iterable[str], W: StepGraphon) -> BlockTable:
    """E_S(g): integrate out every variable of ``g`` outside ``S``."""
    S = set(S)
    unknown = S - set(g.variables)
    if unknown:
        raise ValueError(f"unknown variables {sorted(unknown)}")
    keep = tuple(v for v in g.variables if v in S)
    factors = [(g.variables, g.values)]
    factors += [((v,), W.p) for v in g.variables if v not in S]
    return BlockTable(keep, contract(factors, keep, W.m), g.exact)


def table_from_function(variables: Sequence[str], W: StepGraphon, fn) -> BlockTable:
    """Tabulate ``fn(*blocks)`` over all block tuples."""
    vals = np.empty((W.m,) * len(variables), dtype=object)
    for idx in np.ndindex(vals.shape):
        vals[idx] = fn(*idx)
    return BlockTable(tuple(variables), vals)
