"""Structured reports and their two renderings.

Every report is a plain dict built in a fixed key order.  ``render_json``
writes rationals as "p/q" strings; ``render_table`` prints vectors as
``(a,b/c)`` and lists of flat dicts as aligned columns.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .contraction import ContractionOutcome, DivisorialCertificate, FlipCertificate, FlipResult
from .curves import MoriCone, k_negative_rays, mori_cone
from .divisors import PicardBasis, canonical_divisor, cartier_constraints, picard_basis, q_cartier_data
from .fan import Fan, curve_name, validate_fan
from .fanfile import emit_fan
from .linalg import fmt_q, fmt_vec
from .mmp import MMPRun, MMPStep
from .singularities import KltReport, TerminalReport

_SIGN = {1: "+", -1: "-", 0: "0"}


def _divisor_str(f: Fan, D) -> str:
    parts = []
    for label, c in zip(f.labels, D):
        if c == 0:
            continue
        x = "X" + label[1:] if label.startswith("e") else f"D({label})"
        coef = fmt_q(abs(c))
        term = x if coef == "1" else f"{coef}*{x}"
        parts.append(("- " if c < 0 else "+ ") + term)
    if not parts:
        return "0"
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


def fan_summary(f: Fan) -> dict:
    return {
        "rank": f.rank,
        "rays": [{"label": l, "vector": r} for l, r in zip(f.labels, f.rays)],
        "cones": [f.cone_name(c) for c in f.cones],
    }


def inspect_report(f: Fan) -> dict:
    msg = validate_fan(f)
    props = f.cone_properties()
    gor = q_cartier_data(f, canonical_divisor(f)) is not None
    return {
        "command": "inspect",
        "valid": msg is None,
        "complete": f.is_complete(),
        "simplicial": f.is_simplicial(),
        "q_gorenstein": gor,
        **fan_summary(f),
        "cone_properties": [
            {
                "cone": f.cone_name(c),
                "dim": f.polycone(k).dim,
                "simplicial": p.simplicial,
                "smooth": p.smooth,
                "multiplicity": p.multiplicity,
            }
            for k, (c, p) in enumerate(zip(f.cones, props))
        ],
    }


def picard_report(f: Fan, basis: PicardBasis | None = None) -> dict:
    basis = basis or picard_basis(f)
    K = canonical_divisor(f)
    minus_k = None
    if q_cartier_data(f, K) is not None:
        minus_k = basis.class_of(tuple(-c for c in K))
    return {
        "command": "picard",
        "dimension": basis.dimension,
        "basis": [_divisor_str(f, B) for B in basis.basis],
        "cartier_constraints": [_divisor_str(f, r) for r in cartier_constraints(f)],
        "principal": [
            _divisor_str(f, tuple(Fraction(r[i]) for r in f.rays)) for i in range(f.rank)
        ],
        "minus_K_class": minus_k,
    }


def curves_report(f: Fan, cone: MoriCone | None = None) -> dict:
    cone = cone or mori_cone(f)
    rows = sorted(
        (w.rays, w.name(f.labels), c) for w, c in zip(f.walls, cone.classes)
    )
    return {
        "command": "curves",
        "basis": [_divisor_str(f, B) for B in cone.basis.basis],
        "curves": [{"curve": n, "class": c} for _, n, c in rows],
    }


def ne_report(f: Fan, boundary=None, cone: MoriCone | None = None) -> dict:
    cone = cone or mori_cone(f)
    signs = k_negative_rays(f, boundary, cone)
    return {
        "command": "ne",
        "basis": [_divisor_str(f, B) for B in cone.basis.basis],
        "rays": [
            {
                "ray": r,
                "K_sign": _SIGN[s],
                "curves": " ".join(f.walls[i].name(f.labels) for i in cone.walls_on_ray[k]),
            }
            for k, (r, s) in enumerate(signs)
        ],
    }


def terminal_report(f: Fan, rep: TerminalReport) -> dict:
    out = {"command": "check terminal", "terminal": rep.terminal}
    if rep.terminal:
        out["summary"] = "terminal"
    else:
        name = f.cone_name(f.cones[rep.cone])
        out["witness_cone"] = name
        out["witness_point"] = rep.witness
        out["pairing"] = rep.pairing
        out["summary"] = f"not terminal; witness cone {name}, lattice point {fmt_vec(rep.witness)}"
    return out


def klt_report(f: Fan, boundary, rep: KltReport) -> dict:
    return {
        "command": "check klt",
        "boundary": _divisor_str(f, boundary) if boundary is not None else "0",
        "klt": rep.klt,
        "reason": rep.reason,
        "spot_checks": [{"valuation": w, "discrepancy": a} for w, a in rep.spot_checks],
        "summary": ("klt" if rep.klt else "not klt") + f"; {rep.reason}",
    }


def outcome_dict(o: ContractionOutcome) -> dict:
    f = o.source
    return {
        "ray": o.ray,
        "kind": o.kind,
        "contracted_curves": [f.walls[i].name(f.labels) for i in o.contracted_walls],
        "removed_rays": [f.labels[i] for i in o.removed_rays],
        "merged_cones": [
            " ".join(f.cone_name(f.cones[k]) for k in g) for g in o.merged_groups()
        ],
    }


def divisorial_dict(f: Fan, c: DivisorialCertificate) -> dict:
    return {
        "E": _divisor_str(f, c.exceptional),
        "E_dot_C": [{"curve": f.walls[i].name(f.labels), "value": v} for i, v in c.e_dot_curves],
        "target_picard_dimension": c.target_picard_rank,
        "source_terminal": c.source_terminal,
        "target_terminal": c.target_terminal,
        "target_klt": c.target_klt,
    }


def flip_dict(r: FlipResult, c: FlipCertificate | None) -> dict:
    f = r.fan
    out = {
        "candidates": r.candidates,
        "admissible": r.admissible,
        "flops": r.flops,
        "cells": [" ".join(f.cone_name(cell) for cell in cells) for cells in r.cells],
        "new_walls": [
            {"curve": curve_name(f.labels, w), "K_dot_C": v} for w, v in r.walls
        ],
    }
    if c is not None:
        out["discrepancies"] = [
            {"valuation": w, "a_before": a, "a_after": b} for w, a, b in c.discrepancies
        ]
        out["strict_increase"] = list(c.strict)
        out["flipped_terminal"] = c.flipped_terminal
        out["flipped_klt"] = c.flipped_klt
    return out


def step_dict(s: MMPStep) -> dict:
    f = s.fan
    out = {
        "step": s.number + 1,
        "offered": list(s.offered),
        "chosen": s.chosen,
        **outcome_dict(s.outcome),
        "action": s.kind,
    }
    if s.divisorial is not None:
        out["certificate"] = divisorial_dict(f, s.divisorial)
    if s.flip is not None:
        out["certificate"] = flip_dict(s.flip, s.flip_certificate)
    if s.output is not None:
        out["output_cones"] = [s.output.cone_name(c) for c in s.output.cones]
    return out


def mmp_report(run: MMPRun) -> dict:
    out = {
        "command": "mmp run",
        "status": run.status,
        "steps": len(run.steps),
        "choices": ",".join(str(c) for c in run.choices),
    }
    if run.reason:
        out["reason"] = run.reason
    out["log"] = [step_dict(s) for s in run.steps]
    if run.final is not None and run.status != "mori-fiber-space":
        out["final_fan"] = emit_fan(run.final, run.final_boundary)
    return out


# ----------------------------------------------------------------- rendering


def _jsonable(x):
    if isinstance(x, Fraction):
        return fmt_q(x)
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        if x and all(isinstance(e, (int, Fraction)) and not isinstance(e, bool) for e in x):
            return fmt_vec(x) if isinstance(x, tuple) else [_jsonable(e) for e in x]
        return [_jsonable(e) for e in x]
    raise TypeError(f"cannot serialize {type(x).__name__}")


def render_json(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=2, ensure_ascii=True) + "\n"


def _cell(x) -> str:
    if isinstance(x, bool):
        return "yes" if x else "no"
    if x is None:
        return "-"
    if isinstance(x, Fraction):
        return fmt_q(x)
    if isinstance(x, tuple) and all(isinstance(e, (int, Fraction)) for e in x):
        return fmt_vec(x)
    if isinstance(x, list) and all(isinstance(e, tuple) for e in x):
        return " ".join(_cell(e) for e in x) or "-"
    if isinstance(x, list):
        return "; ".join(_cell(e) for e in x) or "-"
    return str(x)


def _table(rows: list[dict], indent: str) -> list[str]:
    cols = list(rows[0])
    body = [[_cell(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(b[i]) for b in body)) for i, c in enumerate(cols)]
    lines = [indent + "  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    for b in body:
        lines.append(indent + "  ".join(x.ljust(w) for x, w in zip(b, widths)).rstrip())
    return lines


def _flat(rows) -> bool:
    return all(isinstance(r, dict) and not any(isinstance(v, dict) or (isinstance(v, list) and v and isinstance(v[0], dict)) for v in r.values()) for r in rows)


def _render(d: dict, indent: str, lines: list[str]):
    for k, v in d.items():
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            _render(v, indent + "  ", lines)
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{indent}{k}:")
            if _flat(v):
                lines.extend(_table(v, indent + "  "))
            else:
                for item in v:
                    lines.append(f"{indent}  -")
                    _render(item, indent + "    ", lines)
        elif isinstance(v, str) and "\n" in v:
            lines.append(f"{indent}{k}:")
            lines.extend(indent + "  " + s for s in v.rstrip("\n").split("\n"))
        elif isinstance(v, list) and v and all(isinstance(e, str) for e in v):
            lines.append(f"{indent}{k}:")
            lines.extend(f"{indent}  {e}" for e in v)
        else:
            lines.append(f"{indent}{k}: {_cell(v)}")


def render_table(report: dict) -> str:
    lines: list[str] = []
    _render({k: v for k, v in report.items() if k != "command"}, "", lines)
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str) -> str:
    return render_json(report) if fmt == "json" else render_table(report)
