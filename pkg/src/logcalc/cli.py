"""logcalc command line.

Exit status: 0 when every check passed, 1 when a check failed, 2 on usage or
input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import documents, reports
from .calculus import blakley_roy_audit, cfs_audit, sidorenko_margin, smoothness_margin
from .density import hom_density, hom_density_elimination, restricted_density
from .documents import DocumentError, dumps, graph_to_doc, graphon_to_doc, table_to_doc
from .graphon import GraphonError, tensor_power
from .graphs import (GraphError, build_cfs_graph, build_cycle, build_path, build_reflection_tree,
                     build_star, glue, labeled_edge, reflect, retract_check)
from .harness import FAMILIES, SuiteConfig, perturbation_scan, random_direction, run_suite

ENV_TOL = "LOGCALC_TOL"


class UsageError(Exception):
    pass


def _split(s: str) -> list[str]:
    return [x.strip() for x in s.split(",") if x.strip()]


def generated_graph(spec: str):
    """``gen:path:4``, ``gen:path:4:ends``, ``gen:cycle:6``, ``gen:star:3``,
    ``gen:cfs:3:1,2/2,3``, ``gen:edge``."""
    parts = spec.split(":")[1:]
    kind, args = parts[0], parts[1:]
    try:
        if kind == "edge":
            return labeled_edge()
        if kind == "path":
            return build_path(int(args[0]), len(args) > 1 and args[1] == "ends")
        if kind == "cycle":
            return build_cycle(int(args[0]))
        if kind == "star":
            return build_star(int(args[0]))
        if kind == "cfs":
            sets = [[int(x) for x in _split(s)] for s in args[1].split("/")] if len(args) > 1 and args[1] else []
            return build_cfs_graph(int(args[0]), sets)
    except (IndexError, ValueError) as exc:
        raise UsageError(f"bad generator spec {spec!r}: {exc}") from exc
    raise UsageError(f"unknown generator {kind!r}")


def load_graph(spec: str, labels: str | None = None):
    g = generated_graph(spec) if spec.startswith("gen:") else documents.load_graph(spec)
    if labels is None:
        return g
    if labels == "none":
        return g.with_labels(())
    if labels == "edge":
        if not g.edges:
            raise UsageError("graph has no edge to label")
        return g.with_labels(g.edges[0])
    return g.with_labels(_split(labels))


def _tol(args) -> float:
    if args.tol is not None:
        return args.tol
    try:
        return float(os.environ.get(ENV_TOL, "1e-9"))
    except ValueError as exc:
        raise UsageError(f"{ENV_TOL} is not a number") from exc


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def render_report(report, fmt: str, timing: bool = False) -> str:
    if fmt == "structured":
        return dumps(reports.report_to_doc(report, timing))
    return reports.render_text(report, timing)


def _report(args, report) -> None:
    _emit(args, render_report(report, args.format, getattr(args, "timing", False)))


# ---------------------------------------------------------------- verbs


def cmd_density(args):
    g, W = load_graph(args.graph), documents.load_graphon(args.graphon)
    vals = {}
    if args.method in ("brute", "both"):
        vals["brute-force"] = hom_density(g, W).value
    if args.method in ("elim", "both"):
        vals["elimination"] = hom_density_elimination(g, W).value
    if args.format == "structured":
        _emit(args, dumps({"type": "density", **{k: documents.frac_str(v) for k, v in vals.items()}}))
    else:
        _emit(args, "".join(f"{k:<12} {documents.frac_str(v)}  (~{float(v):.12g})\n" for k, v in vals.items()))
    return 0 if len(set(vals.values())) == 1 else 1


def cmd_restricted(args):
    g, W = load_graph(args.graph, args.labels), documents.load_graphon(args.graphon)
    t = restricted_density(g, W)
    if args.format == "structured":
        _emit(args, dumps({"type": "table", **table_to_doc(t)}))
    else:
        lines = [f"t_S(H, W) over {list(t.variables)}"]
        lines += [f"  {idx}  {documents.frac_str(v)}" for idx, v in t.items()]
        _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_margin(args):
    rep = sidorenko_margin(load_graph(args.graph), documents.load_graphon(args.graphon))
    _report(args, rep)
    return 0 if rep.passed(_tol(args)) else 1


def cmd_smooth(args):
    rep = smoothness_margin(load_graph(args.graph, args.labels), documents.load_graphon(args.graphon))
    _report(args, rep)
    return 0 if rep.passed(_tol(args)) else 1


def cmd_audit(args):
    W = documents.load_graphon(args.graphon)
    if args.kind == "blakley-roy":
        if args.n is None:
            raise UsageError("--n is required for the blakley-roy audit")
        rep = blakley_roy_audit(args.n, W)
    else:
        if args.k is None:
            raise UsageError("--k is required for the cfs audit")
        sets = [[int(x) for x in _split(s)] for s in args.sets.split("/")] if args.sets else []
        rep = cfs_audit(args.k, sets, W)
    _report(args, rep)
    return 0 if rep.passed(margin_tol=_tol(args)) else 1


def cmd_glue(args):
    if len(args.graph) != 2:
        raise UsageError("glue takes exactly two --graph arguments")
    g = glue(load_graph(args.graph[0]), load_graph(args.graph[1]))
    _emit(args, dumps(graph_to_doc(g)))
    return 0


def cmd_reflect(args):
    g = reflect(load_graph(args.graph), _split(args.K), _split(args.S))
    _emit(args, dumps(graph_to_doc(g)))
    return 0


def cmd_rtree(args):
    tree = load_graph(args.tree)
    ops = []
    for r in args.reflect or []:
        if ":" not in r:
            raise UsageError(f"reflection {r!r} must look like 'K1,K2,...:S1,...'")
        K, S = r.split(":", 1)
        ops.append((_split(K), _split(S)))
    g = build_reflection_tree(tree, ops)
    _emit(args, dumps(graph_to_doc(g)))
    return 0


def cmd_tensor(args):
    W = tensor_power(documents.load_graphon(args.graphon), args.k)
    _emit(args, dumps(graphon_to_doc(W)))
    return 0


def cmd_retract(args):
    g = load_graph(args.graph)
    if args.labels in (None, "labeled"):
        S = list(g.labels)
    elif args.labels == "edge":
        if not g.edges:
            raise UsageError("graph has no edge")
        S = list(g.edges[0])
    else:
        S = _split(args.labels)
    res = retract_check(g, S)
    if args.format == "structured":
        _emit(args, dumps({"type": "retract", "retract": res.found, "target": S, "witness": res.witness}))
    else:
        msg = f"retract onto {S}: " + (f"yes, witness {res.witness}" if res else "no retract")
        _emit(args, msg + "\n")
    return 0 if res else 1


def cmd_suite(args):
    graph = load_graph(args.graph, args.labels) if args.graph else None
    cfg = SuiteConfig(args.family, args.trials, args.max_blocks, Fraction(args.floor), args.seed,
                      _tol(args) if args.tol is not None or os.environ.get(ENV_TOL) else None, graph)
    rep = run_suite(cfg)
    _report(args, rep)
    return 0 if rep.passed else 1


def cmd_scan(args):
    g = load_graph(args.graph)
    if args.direction:
        doc = json.loads(open(args.direction).read())
        direction = [[Fraction(str(x)) for x in row] for row in doc["matrix"]]
    else:
        direction = random_direction(args.blocks, args.seed, degree_regular=args.degree_regular)
    eps = [Fraction(x) for x in _split(args.eps)]
    reps = perturbation_scan(g, Fraction(args.base), direction, eps)
    _report(args, reps)
    return 0 if all(r.passed(_tol(args)) for r in reps) else 1


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="logcalc", description="Logarithmic calculus for subgraph densities.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--tol", type=float, default=None, help=f"margin tolerance (default ${ENV_TOL} or 1e-9)")
    sub = p.add_subparsers(dest="verb", required=True)

    def add(name, fn, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("density", cmd_density, "homomorphism density t(H, W)")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--graphon", required=True)
    sp.add_argument("--method", choices=("brute", "elim", "both"), default="both")

    sp = add("restricted", cmd_restricted, "restricted density t_S(H, W)")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--graphon", required=True)
    sp.add_argument("--labels")

    sp = add("margin", cmd_margin, "Sidorenko margin ln t(H, W) - e ln d")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--graphon", required=True)

    sp = add("smooth", cmd_smooth, "smoothness margin of the labeled tree")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--graphon", required=True)
    sp.add_argument("--labels", help="'edge', 'none' or a comma list of vertices")

    sp = add("audit", cmd_audit, "step-by-step proof audit")
    sp.add_argument("--kind", choices=("blakley-roy", "cfs"), required=True)
    sp.add_argument("--graphon", required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--sets", default="", help="attachment sets, e.g. '1,2/2,3'")

    sp = add("glue", cmd_glue, "product of two labeled graphs")
    sp.add_argument("--graph", action="append", required=True)

    sp = add("reflect", cmd_reflect, "reflect an induced subgraph along an independent set")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--K", required=True)
    sp.add_argument("--S", required=True)

    sp = add("rtree", cmd_rtree, "build a reflection tree")
    sp.add_argument("--tree", required=True)
    sp.add_argument("--reflect", action="append", help="'K1,K2,...:S1,...' (repeatable)")

    sp = add("tensor", cmd_tensor, "tensor power of a graphon")
    sp.add_argument("--graphon", required=True)
    sp.add_argument("--k", type=int, default=2)

    sp = add("retract", cmd_retract, "retract test")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--labels", help="'labeled' (default), 'edge' or a comma list of vertices")

    sp = add("suite", cmd_suite, "randomized property suite")
    sp.add_argument("--family", choices=FAMILIES, required=True)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-blocks", type=int, default=4)
    sp.add_argument("--floor", default="1/20")
    sp.add_argument("--graph", help="graph for the edge-smooth family")
    sp.add_argument("--labels")
    sp.add_argument("--timing", action="store_true", help="include wall-clock time in the report")

    sp = add("scan", cmd_scan, "Sidorenko margins along a zero-mean perturbation of a constant graphon")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--base", default="1/2")
    sp.add_argument("--blocks", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--eps", default="0,1/100,1/50,1/20,1/10")
    sp.add_argument("--direction", help="JSON file with a 'matrix' field")
    sp.add_argument("--degree-regular", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (DocumentError, GraphError, GraphonError, UsageError, ValueError, OSError) as exc:
        print(f"logcalc {args.verb}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
