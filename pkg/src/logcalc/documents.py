"""JSON documents for graphs, graphons and tables.

Graph:   {"vertices": [...], "edges": [[u, v], ...], "labels": [...]}
Graphon: {"weights": ["1/2", ...], "matrix": [["1", "1/2"], ...]}

Rationals are written as "p/q" strings, floats as their shortest round-trip
repr (with "inf", "-inf", "nan" spelled out).
"""

from __future__ import annotations

import hashlib
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .density import BlockTable
from .graphon import GraphonError, StepGraphon
from .graphs import GraphError, LabeledGraph


class DocumentError(ValueError):
    def __init__(self, source: str, where: str, msg: str):
        super().__init__(f"{source}: {where}: {msg}" if where else f"{source}: {msg}")
        self.source, self.where = source, where


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def float_out(x: float):
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def float_in(x) -> float:
    return float(x)


def graph_to_doc(g: LabeledGraph) -> dict:
    return {"vertices": list(g.vertices), "edges": [list(e) for e in g.edges], "labels": list(g.labels)}


def graphon_to_doc(w: StepGraphon) -> dict:
    return {"weights": [frac_str(x) for x in w.node_weights],
            "matrix": [[frac_str(x) for x in row] for row in w.matrix]}


def table_to_doc(t: BlockTable) -> dict:
    conv = frac_str if t.exact else float_out
    vals = np.vectorize(conv, otypes=[object])(t.values) if t.arity else conv(t.values[()])
    return {"variables": list(t.variables), "exact": t.exact,
            "values": vals.tolist() if t.arity else vals}


def table_from_doc(doc: dict) -> BlockTable:
    conv = Fraction if doc["exact"] else float_in
    arr = np.array(doc["values"], dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = conv(arr[idx])
    return BlockTable(tuple(doc["variables"]), out, doc["exact"])


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def digest(*docs) -> str:
    h = hashlib.sha256()
    for d in docs:
        h.update(json.dumps(d, sort_keys=True, separators=(",", ":")).encode())
    return h.hexdigest()[:16]


# ---------------------------------------------------------------- loading


def _read(path: str) -> tuple[str, object]:
    source = "<stdin>" if path == "-" else str(path)
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise DocumentError(source, "", exc.strerror or str(exc)) from exc
    try:
        return source, json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(source, f"line {exc.lineno} column {exc.colno}", exc.msg) from exc


def graph_from_doc(doc, source: str = "<doc>") -> LabeledGraph:
    if not isinstance(doc, dict):
        raise DocumentError(source, "", "graph document must be an object")
    verts = doc.get("vertices", [])
    edges = doc.get("edges")
    labels = doc.get("labels", [])
    if edges is None:
        raise DocumentError(source, "edges", "missing field")
    if len(set(map(str, verts))) != len(verts):
        dup = sorted({str(v) for v in verts if list(map(str, verts)).count(str(v)) > 1})
        raise DocumentError(source, "vertices", f"duplicate vertices {dup}")
    seen = {}
    for i, e in enumerate(edges):
        if not isinstance(e, list) or len(e) != 2:
            raise DocumentError(source, f"edges[{i}]", "an edge is a 2-element list")
        key = frozenset(map(str, e))
        if key in seen:
            raise DocumentError(source, f"edges[{i}]", f"duplicate of edges[{seen[key]}] {e}")
        seen[key] = i
    for i, v in enumerate(labels):
        if labels.index(v) != i:
            raise DocumentError(source, f"labels[{i}]", f"vertex {v!r} already carries label {labels.index(v) + 1}")
    try:
        return LabeledGraph.from_edges(edges, labels, verts)
    except GraphError as exc:
        raise DocumentError(source, "", str(exc)) from exc


def graphon_from_doc(doc, source: str = "<doc>") -> StepGraphon:
    if not isinstance(doc, dict) or "weights" not in doc or "matrix" not in doc:
        raise DocumentError(source, "", "graphon document needs 'weights' and 'matrix'")
    try:
        p = [Fraction(str(x)) for x in doc["weights"]]
    except (ValueError, ZeroDivisionError) as exc:
        raise DocumentError(source, "weights", str(exc)) from exc
    if sum(p) != 1:
        raise DocumentError(source, "weights", f"weights sum to {frac_str(sum(p))}, not 1")
    rows = doc["matrix"]
    mat = []
    for i, row in enumerate(rows):
        out = []
        for j, x in enumerate(row):
            try:
                out.append(Fraction(str(x)))
            except (ValueError, ZeroDivisionError) as exc:
                raise DocumentError(source, f"matrix[{i}][{j}]", f"not a rational: {x!r}") from exc
        mat.append(out)
    for i in range(len(mat)):
        for j in range(i + 1, len(mat[i])):
            if j < len(mat) and i < len(mat[j]) and mat[i][j] != mat[j][i]:
                raise DocumentError(source, f"matrix[{i}][{j}] vs matrix[{j}][{i}]",
                                    f"not symmetric ({frac_str(mat[i][j])} != {frac_str(mat[j][i])})")
    try:
        return StepGraphon(tuple(p), tuple(tuple(r) for r in mat))
    except GraphonError as exc:
        raise DocumentError(source, "", str(exc)) from exc


def load_graph(path: str) -> LabeledGraph:
    source, doc = _read(path)
    return graph_from_doc(doc, source)


def load_graphon(path: str) -> StepGraphon:
    source, doc = _read(path)
    return graphon_from_doc(doc, source)
