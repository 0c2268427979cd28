"""Serialisation of analysis results: a versioned JSON document and a plain
text rendering of the same content.

Every float is rounded to 12 significant digits before it is written, and
keys are sorted, so identical inputs give identical bytes.
"""
from __future__ import annotations

import json

import numpy as np

from .graph_core import DirectedGraph, format_graph, is_in_degree_regular
from .spectral import Spectrum

SCHEMA_VERSION = 1
SIG_DIGITS = 12


def real(x) -> float:
    x = float(x)
    if x == 0.0:
        return 0.0  # drop the sign of -0.0
    return float(f"{x:.{SIG_DIGITS}g}")


def cplx(z) -> dict:
    z = complex(z)
    return {"re": real(z.real), "im": real(z.imag)}


def graph_summary(g: DirectedGraph) -> dict:
    return {
        "n": g.n,
        "edge_count": len(g.edges),
        "in_degree_regular": is_in_degree_regular(g),
        "echo": format_graph(g),
    }


def spectrum_table(spec: Spectrum) -> dict:
    return {
        "tol_cluster": real(spec.tol),
        "tol_rank": real(spec.tol_rank),
        "eigenvalues": [
            {"value": cplx(e.value), "alg_mult": e.alg_mult, "geo_mult": e.geo_mult}
            for e in spec
        ],
    }


def verdict_dict(v) -> dict:
    return {
        "controllable": bool(v.controllable),
        "rank": None if v.rank is None else int(v.rank),
        "method": v.method,
        "tolerance": real(v.tolerance),
    }


def plan_dict(plan) -> dict:
    return {
        "root": plan.root,
        "relabel_permutation": list(plan.relabel_permutation),
        "initial_rank": plan.initial_rank,
        "final_rank": plan.final_rank,
        "iterations": plan.iterations,
        "theta_final": real(plan.theta_final),
        "adjusted_edges": [
            {"src": e.src, "dst": e.dst, "old_weight": real(e.old_weight),
             "new_weight": real(e.new_weight)}
            for e in plan.adjusted_edges
        ],
    }


def _plain(obj):
    # numpy scalars and tuples slip in easily; make everything JSON-native
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return real(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return cplx(obj)
    return obj


def to_json(report: dict) -> str:
    return json.dumps(_plain(report), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def _fmt_value(v) -> str:
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        if v["im"] == 0.0:
            return f"{v['re']:.6g}"
        sign = "+" if v["im"] > 0 else "-"
        return f"{v['re']:.6g} {sign} {abs(v['im']):.6g}i"
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, dict):
        return "(" + " ".join(f"{k}={_fmt_value(v[k])}" for k in sorted(v)) + ")"
    if isinstance(v, list):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    if isinstance(v, str) and "\n" in v:
        return "\n    " + v.rstrip("\n").replace("\n", "\n    ")
    return str(v)


def _render_block(lines, key, value, indent):
    pad = "  " * indent
    if isinstance(value, dict) and set(value) != {"re", "im"}:
        lines.append(f"{pad}{key}:")
        for k in sorted(value):
            _render_block(lines, k, value[k], indent + 1)
    elif isinstance(value, list) and value and isinstance(value[0], dict) \
            and set(value[0]) != {"re", "im"}:
        lines.append(f"{pad}{key}:")
        for item in value:
            lines.append(f"{pad}  - " + ", ".join(
                f"{k}={_fmt_value(item[k])}" for k in sorted(item)))
    elif isinstance(value, list) and value and isinstance(value[0], list):
        lines.append(f"{pad}{key}: " + " ".join(_fmt_value(x) for x in value))
    else:
        text = _fmt_value(value)
        sep = "" if text.startswith("\n") else " "
        lines.append(f"{pad}{key}:{sep}{text}")


def render_text(report: dict) -> str:
    """Human-readable view: graph summary, spectrum table, then results."""
    report = _plain(report)
    lines = [f"{report['command']}: {report['verdict']['summary']}"]
    g = report["graph"]
    lines.append(
        f"graph: n={g['n']} edges={g['edge_count']} in-degree regular={g['in_degree_regular']}"
    )
    spec = report.get("spectrum")
    if spec:
        lines.append("")
        lines.append(f"{'eigenvalue':>28}  {'alg':>3}  {'geo':>3}")
        for e in spec["eigenvalues"]:
            lines.append(f"{_fmt_value(e['value']):>28}  {e['alg_mult']:>3}  {e['geo_mult']:>3}")
    lines.append("")
    for key in sorted(report["results"]):
        _render_block(lines, key, report["results"][key], 0)
    for d in report["diagnostics"]:
        lines.append(f"warning: {d}")
    return "\n".join(lines) + "\n"
