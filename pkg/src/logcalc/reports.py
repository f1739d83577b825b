"""Structured (JSON) and text renderings of margin, audit, suite and scan reports.

Structured output is stable-keyed; rationals are "p/q" strings and floats are
JSON numbers, except non-finite floats which are the strings "inf", "-inf",
"nan". ``report_from_doc(report_to_doc(r))`` reproduces every numeric field.
"""

from __future__ import annotations

from dataclasses import fields
from fractions import Fraction

from .calculus import AdditivityReport, AuditReport, ForcingResult, MarginReport, Step, Verdict
from .documents import float_out, frac_str, table_from_doc, table_to_doc
from .harness import ProbeReport, SuiteReport, Trial

_NONFINITE = {"inf", "-inf", "nan"}


def _num_out(x):
    if isinstance(x, Fraction):
        return frac_str(x)
    if isinstance(x, float):
        return float_out(x)
    return x


def _num_in(x):
    if isinstance(x, str):
        return float(x) if x in _NONFINITE else Fraction(x)
    return x


def _float_in(x) -> float:
    return float(x)


def margin_to_doc(r: MarginReport) -> dict:
    return {"type": "margin", "kind": r.kind, "lhs": float_out(r.lhs), "rhs": float_out(r.rhs),
            "margin": float_out(r.margin), "support_violation": [list(t) for t in r.support_violation],
            "violation_vars": list(r.violation_vars), "retract": r.retract,
            "exact": {k: _num_out(v) for k, v in r.exact.items()}, "digest": r.digest}


def margin_from_doc(d: dict) -> MarginReport:
    return MarginReport(d["kind"], _float_in(d["lhs"]), _float_in(d["rhs"]), _float_in(d["margin"]),
                        [tuple(t) for t in d["support_violation"]], tuple(d["violation_vars"]),
                        d["retract"], {k: _num_in(v) for k, v in d["exact"].items()}, d["digest"])


def report_to_doc(r, timing: bool = False) -> dict:
    if isinstance(r, MarginReport):
        return margin_to_doc(r)
    if isinstance(r, AuditReport):
        return {"type": "audit", "kind": r.kind, "params": r.params,
                "steps": [{f.name: _num_out(getattr(s, f.name)) for f in fields(Step)} for s in r.steps],
                "final_margin": float_out(r.final_margin), "chain_residual": float_out(r.chain_residual),
                "tables": {k: table_to_doc(t) for k, t in r.tables.items()}, "digest": r.digest}
    if isinstance(r, SuiteReport):
        doc = {"type": "suite", "family": r.family, "config": r.config,
               "trials": [{"index": t.index, "seed": t.seed, "params": t.params, "graph": t.graph,
                           "graphon": t.graphon, "report": margin_to_doc(t.report)} for t in r.trials],
               "min_margin": float_out(r.min_margin), "failures": list(r.failures)}
        if timing:
            doc["wall_clock"] = r.wall_clock
        return doc
    if isinstance(r, ForcingResult):
        return {"type": "forcing", "verdict": r.verdict.value, "margin": float_out(r.margin),
                "deviation": float_out(r.deviation)}
    if isinstance(r, AdditivityReport):
        return {"type": "additivity", "first": margin_to_doc(r.first), "second": margin_to_doc(r.second),
                "glued": margin_to_doc(r.glued), "lhs_residual": float_out(r.lhs_residual),
                "margin_residual": float_out(r.margin_residual)}
    if isinstance(r, ProbeReport):
        return {"type": "probe", "min_margin": float_out(r.min_margin),
                "margins": [float_out(x) for x in r.margins], "negative": r.negative,
                "sidorenko_min": float_out(r.sidorenko_min)}
    if isinstance(r, list):
        return {"type": "scan", "reports": [margin_to_doc(x) for x in r]}
    raise TypeError(f"no structured form for {type(r).__name__}")


def report_from_doc(d: dict):
    kind = d["type"]
    if kind == "margin":
        return margin_from_doc(d)
    if kind == "audit":
        steps = [Step(s["name"], s["kind"], _float_in(s["lhs"]), _float_in(s["rhs"]),
                      _float_in(s["margin"]), s["chain"]) for s in d["steps"]]
        return AuditReport(d["kind"], d["params"], steps, _float_in(d["final_margin"]),
                           _float_in(d["chain_residual"]),
                           {k: table_from_doc(t) for k, t in d["tables"].items()}, d["digest"])
    if kind == "suite":
        trials = [Trial(t["index"], t["seed"], t["params"], t["graph"], t["graphon"],
                        margin_from_doc(t["report"])) for t in d["trials"]]
        return SuiteReport(d["family"], d["config"], trials, _float_in(d["min_margin"]),
                           list(d["failures"]), d.get("wall_clock", 0.0))
    if kind == "forcing":
        return ForcingResult(Verdict(d["verdict"]), _float_in(d["margin"]), _float_in(d["deviation"]))
    if kind == "additivity":
        return AdditivityReport(margin_from_doc(d["first"]), margin_from_doc(d["second"]),
                                margin_from_doc(d["glued"]), _float_in(d["lhs_residual"]),
                                _float_in(d["margin_residual"]))
    if kind == "probe":
        return ProbeReport(_float_in(d["min_margin"]), [_float_in(x) for x in d["margins"]],
                           d["negative"], _float_in(d["sidorenko_min"]))
    if kind == "scan":
        return [margin_from_doc(x) for x in d["reports"]]
    raise ValueError(f"unknown report type {kind!r}")


# ---------------------------------------------------------------- text


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return f"{frac_str(x)} (~{float(x):.12g})"
    if isinstance(x, float):
        return f"{x:+.12e}"
    return str(x)


def _margin_lines(r: MarginReport) -> list[str]:
    rows = [("kind", r.kind), ("lhs", r.lhs), ("rhs", r.rhs), ("margin", r.margin)]
    rows += [(k, v) for k, v in r.exact.items()]
    if r.violated:
        rows.append(("support_violation", f"{len(r.support_violation)} tuple(s) over {list(r.violation_vars)}: "
                                          f"{r.support_violation[:8]}"))
        rows.append(("retract", r.retract))
    rows.append(("digest", r.digest))
    width = max(len(k) for k, _ in rows)
    return [f"{k:<{width}}  {_fmt(v)}" for k, v in rows]


def render_text(r, timing: bool = False) -> str:
    if isinstance(r, MarginReport):
        lines = _margin_lines(r)
    elif isinstance(r, AuditReport):
        lines = [f"{r.kind} audit {r.params}"]
        width = max(len(s.name) for s in r.steps)
        for s in r.steps:
            tag = "ok" if s.passed() else "FAIL"
            lines.append(f"  [{s.kind[:5]:<5}] {s.name:<{width}}  margin {s.margin:+.3e}  {tag}")
        lines.append(f"final margin    {r.final_margin:+.12e}")
        lines.append(f"chain residual  {r.chain_residual:+.3e}")
    elif isinstance(r, SuiteReport):
        lines = [f"suite {r.family}: {len(r.trials)} trials, min margin {r.min_margin:+.6e}, "
                 f"{len(r.failures)} failure(s)"]
        if timing:
            lines.append(f"wall clock {r.wall_clock:.2f}s")
        for i in r.failures:
            t = r.trials[i]
            lines.append(f"  trial {i} (seed {t.seed}): margin {t.report.margin:+.6e} params {t.params}")
    elif isinstance(r, ForcingResult):
        lines = [f"verdict    {r.verdict.value}", f"margin     {r.margin:+.12e}", f"deviation  {r.deviation:.6g}"]
    elif isinstance(r, AdditivityReport):
        lines = [f"lhs(H1) + lhs(H2)  {r.first.lhs + r.second.lhs:+.12e}", f"lhs(H1H2)          {r.glued.lhs:+.12e}",
                 f"lhs residual       {r.lhs_residual:+.3e}", f"margin residual    {r.margin_residual:+.3e}"]
    elif isinstance(r, ProbeReport):
        lines = [f"min smoothness margin  {r.min_margin:+.6e}", f"negative margins       {r.negative}",
                 f"min sidorenko margin   {r.sidorenko_min:+.6e}"]
    elif isinstance(r, list):
        lines = [f"{'eps':>10}  {'margin':>22}  {'margin/eps^2':>14}"]
        for x in r:
            eps = x.exact.get("eps", Fraction(0))
            ratio = x.exact.get("margin/eps^2")
            lines.append(f"{float(eps):>10.4g}  {x.margin:>+22.12e}  "
                         f"{'' if ratio is None else format(ratio, '.6g'):>14}")
    else:
        raise TypeError(f"no text form for {type(r).__name__}")
    return "\n".join(lines) + "\n"
