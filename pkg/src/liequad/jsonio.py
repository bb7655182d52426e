"""JSON schemas: algebras, forms, Pfaffian systems, traces, group laws.

All scalar payloads use the canonical text serialization of their class;
indices are 1-based in files and 0-based in memory.  Emitted documents
re-parse to structurally equal values.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Mapping

import sympy as sp

from .errors import SchemaError
from .exppoly import ExpPoly
from .forms import DiffForm, Domain, VectorField
from .liealg import StructureConstants
from .rational import LogExtendedScalar, RationalFunction, _sym
from .varset import VarSet

SCALAR_KINDS = {"exppoly": ExpPoly, "rational": RationalFunction}


def _coeff_to_fraction(text, params: Mapping[str, Fraction]) -> Fraction:
    try:
        expr = sp.sympify(str(text), rational=True)
        expr = expr.subs({sp.Symbol(k): sp.Rational(v.numerator, v.denominator) for k, v in params.items()})
        if not expr.is_Rational:
            raise SchemaError(
                f"coefficient {text!r} does not reduce to a rational; bind all parameters"
            )
        return Fraction(int(expr.p), int(expr.q))
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"bad coefficient {text!r}: {exc}") from exc


def load_algebra(doc: dict) -> StructureConstants:
    """{"dim": n, "brackets": [{"i":…, "j":…, "coeffs": {k: rational-string}}],
    "params": {name: rational-string}}"""
    try:
        dim = int(doc["dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError("algebra document needs an integer 'dim'") from exc
    params = {}
    for name, value in (doc.get("params") or {}).items():
        try:
            params[name] = Fraction(str(value))
        except ValueError as exc:
            raise SchemaError(f"parameter {name!r} must be rational, got {value!r}") from exc
    brackets: dict[tuple[int, int], dict[int, Fraction]] = {}
    for entry in doc.get("brackets", []):
        try:
            i, j = int(entry["i"]), int(entry["j"])
            coeffs = {int(k): _coeff_to_fraction(v, params) for k, v in entry["coeffs"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad bracket entry {entry!r}") from exc
        key = (i, j)
        acc = brackets.setdefault(key, {})
        for k, c in coeffs.items():
            acc[k] = acc.get(k, Fraction(0)) + c
    try:
        return StructureConstants.from_brackets(dim, brackets)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def dump_algebra(sc: StructureConstants, params: dict | None = None) -> dict:
    brackets = []
    for j in range(sc.dim):
        for k in range(j + 1, sc.dim):
            coeffs = {}
            for i in range(sc.dim):
                c = sc.C[i][j][k]
                if c != 0:
                    coeffs[str(i + 1)] = str(c)
            if coeffs:
                brackets.append({"i": j + 1, "j": k + 1, "coeffs": coeffs})
    doc = {"dim": sc.dim, "brackets": brackets}
    if params:
        doc["params"] = {k: str(v) for k, v in params.items()}
    return doc


# ----------------------------------------------------------------------
# scalars

def dump_scalar(s) -> dict:
    if isinstance(s, ExpPoly):
        return {"kind": "exppoly", "text": s.to_text()}
    if isinstance(s, RationalFunction):
        return {"kind": "rational", "text": s.to_text()}
    if isinstance(s, LogExtendedScalar):
        return {
            "kind": "log-extended",
            "rational": s.rational_part.to_text(),
            "logs": [
                {"coeff": str(c), "arg": sp.sstr(a)} for c, a in s.log_terms
            ],
        }
    raise SchemaError(f"unknown scalar type {type(s).__name__}")


def load_scalar(doc: dict, chart: VarSet):
    kind = doc.get("kind")
    if kind == "exppoly":
        return ExpPoly.parse(chart, doc["text"])
    if kind == "rational":
        return RationalFunction.parse(chart, doc["text"])
    if kind == "log-extended":
        rat = RationalFunction.parse(chart, doc["rational"])
        logs = []
        local = {n: _sym(n) for n in chart.names}
        for item in doc["logs"]:
            logs.append(
                (Fraction(item["coeff"]), sp.sympify(item["arg"], locals=local))
            )
        return LogExtendedScalar(chart, rat, logs)
    raise SchemaError(f"unknown scalar kind {kind!r}")


# ----------------------------------------------------------------------
# forms

def dump_form(form: DiffForm) -> dict:
    kind = "exppoly" if form.scls is ExpPoly else "rational"
    terms = []
    for idx in sorted(form.coeffs):
        c = form.coeffs[idx]
        terms.append({"idx": [i + 1 for i in idx], "coeff": c.to_text()})
    return {"degree": form.degree, "scalar_kind": kind, "terms": terms}


def load_form(doc: dict, chart: VarSet) -> DiffForm:
    try:
        degree = int(doc["degree"])
        scls = SCALAR_KINDS[doc["scalar_kind"]]
        coeffs = {}
        for term in doc["terms"]:
            idx = tuple(int(i) - 1 for i in term["idx"])
            coeffs[idx] = scls.parse(chart, term["coeff"])
        return DiffForm(chart, degree, coeffs, scls)
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad form document: {exc}") from exc


def dump_forms_file(chart: VarSet, forms) -> dict:
    return {"chart": list(chart.names), "forms": [dump_form(f) for f in forms]}


def load_forms_file(doc: dict) -> tuple[VarSet, list[DiffForm]]:
    try:
        chart = VarSet(tuple(doc["chart"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad chart: {exc}") from exc
    return chart, [load_form(d, chart) for d in doc.get("forms", [])]


# ----------------------------------------------------------------------
# Pfaffian systems

def load_pfaffian_file(doc: dict):
    """{"chart": [...], "excluded": [poly-strings], "theta": [form-docs],
    "symmetry": [{"components": [rational-strings]}], "brackets": algebra-doc}"""
    from .pfaffian import PfaffianSystem, SymmetryAlgebra

    try:
        chart = VarSet(tuple(doc["chart"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad chart: {exc}") from exc
    excluded = tuple(
        RationalFunction.parse(chart, text) for text in doc.get("excluded", [])
    )
    domain = Domain(chart, excluded)
    theta = [load_form(d, chart) for d in doc.get("theta", [])]
    fields = []
    for vf in doc.get("symmetry", []):
        comps = [RationalFunction.parse(chart, t) for t in vf["components"]]
        fields.append(VectorField(chart, comps, RationalFunction))
    constants = load_algebra(doc["brackets"])
    return PfaffianSystem(domain, theta), SymmetryAlgebra(fields, constants)


# ----------------------------------------------------------------------
# traces and group laws

def dump_trace(trace) -> dict:
    steps = []
    for step in trace.steps:
        factor = None
        if step.factor is not None:
            factor = [[dump_scalar(c) for c in row] for row in step.factor]
        steps.append({"level": step.level, "f": dump_scalar(step.f), "factor": factor})
    return {
        "chart": list(trace.chart.names),
        "basepoint": {k: str(v) for k, v in trace.basepoint.items()},
        "steps": steps,
        "functions": [dump_scalar(f) for f in trace.functions if f is not None],
        "complete": trace.complete,
        "residual_forms": [dump_form(f) for f in trace.residual_forms],
    }


def dump_grouplaw(law) -> dict:
    n = law.group.n
    mu = {
        f"z{i + 1}": law.mu.components[i].to_text() for i in range(n)
    }
    ad = [[e.to_text() for e in row] for row in law.ad]
    return {
        "chart": list(law.group.chart.names),
        "doubled_chart": list(law.mu.source.names),
        "mu": mu,
        "ad": ad,
    }


def write_json(path: str, doc: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from exc
