"""Step graphons: m blocks with rational node weights and a symmetric
non-negative rational weight matrix. Finite graphs are the 0/1 case with
uniform node weights."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import lcm

import numpy as np


class GraphonError(ValueError):
    pass


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise GraphonError(f"not a rational: {x!r}")
    if isinstance(x, (int, str)):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise GraphonError(f"not a rational: {x!r}") from exc
    if isinstance(x, float):
        return Fraction(x)
    raise GraphonError(f"not a rational: {x!r}")


@dataclass(frozen=True)
class StepGraphon:
    node_weights: tuple[Fraction, ...]
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        p = tuple(as_fraction(x) for x in self.node_weights)
        rows = tuple(tuple(as_fraction(x) for x in row) for row in self.matrix)
        m = len(p)
        if m == 0:
            raise GraphonError("a step graphon needs at least one block")
        if any(x <= 0 for x in p):
            raise GraphonError("node weights must be positive")
        if sum(p) != 1:
            raise GraphonError(f"node weights sum to {sum(p)}, not 1")
        if len(rows) != m or any(len(r) != m for r in rows):
            raise GraphonError(f"matrix must be {m}x{m}")
        for i in range(m):
            for j in range(m):
                if rows[i][j] < 0:
                    raise GraphonError(f"negative entry at [{i}][{j}]")
                if rows[i][j] != rows[j][i]:
                    raise GraphonError(
                        f"matrix not symmetric: [{i}][{j}]={rows[i][j]} but [{j}][{i}]={rows[j][i]}")
        object.__setattr__(self, "node_weights", p)
        object.__setattr__(self, "matrix", rows)

    @property
    def m(self) -> int:
        return len(self.node_weights)

    @property
    def strictly_positive(self) -> bool:
        return all(x > 0 for row in self.matrix for x in row)

    @cached_property
    def p(self) -> np.ndarray:
        return np.array(self.node_weights, dtype=object)

    @cached_property
    def w(self) -> np.ndarray:
        out = np.empty((self.m, self.m), dtype=object)
        for i, j in product(range(self.m), repeat=2):
            out[i, j] = self.matrix[i][j]
        return out

    @cached_property
    def scaled(self):
        """Integer form ``(P, pden, N, wden)`` with ``p = P/pden`` and ``W = N/wden``."""
        pden = lcm(*(x.denominator for x in self.node_weights))
        wden = lcm(*(x.denominator for row in self.matrix for x in row))
        P = np.array([int(x * pden) for x in self.node_weights], dtype=object)
        N = np.empty((self.m, self.m), dtype=object)
        for i, j in product(range(self.m), repeat=2):
            N[i, j] = int(self.matrix[i][j] * wden)
        return P, pden, N, wden

    @classmethod
    def uniform(cls, matrix) -> StepGraphon:
        m = len(matrix)
        return cls((Fraction(1, m),) * m, matrix)

    @classmethod
    def constant(cls, c, m: int = 1) -> StepGraphon:
        return cls.uniform([[c] * m for _ in range(m)])

    @classmethod
    def identity(cls, m: int = 2) -> StepGraphon:
        return cls.uniform([[int(i == j) for j in range(m)] for i in range(m)])

    @classmethod
    def from_adjacency(cls, adj) -> StepGraphon:
        """Finite graph G as a graphon: one block per vertex, uniform weights."""
        return cls.uniform([[int(bool(x)) for x in row] for row in adj])

    def __repr__(self):
        p = ", ".join(str(x) for x in self.node_weights)
        rows = "; ".join(" ".join(str(x) for x in r) for r in self.matrix)
        return f"StepGraphon(p=[{p}], W=[{rows}])"


def tensor_power(g: StepGraphon, k: int) -> StepGraphon:
    """k-th tensor power: blocks are k-tuples, node weights and entries multiply."""
    if k < 1:
        raise GraphonError("tensor power needs k >= 1")
    blocks = list(product(range(g.m), repeat=k))
    p = []
    for b in blocks:
        x = Fraction(1)
        for i in b:
            x *= g.node_weights[i]
        p.append(x)
    rows = []
    for a in blocks:
        row = []
        for b in blocks:
            x = Fraction(1)
            for i, j in zip(a, b):
                x *= g.matrix[i][j]
            row.append(x)
        rows.append(row)
    return StepGraphon(tuple(p), tuple(tuple(r) for r in rows))
