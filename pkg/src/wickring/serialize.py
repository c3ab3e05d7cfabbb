"""JSON formats for ring objects and problem files.

Element::

    {"m": 3, "d": 4, "terms": [{"index": [[1, 2]], "re": 0.5, "im": 0.0}, ...]}

Matrix ``{"rows", "cols", "entries": [element, ...]}`` (row-major), rational
``{"num": [matrix, ...], "den": [element, ...]}`` (coefficients of
``lambda^0, lambda^1, ...``) and realization ``{"A", "B", "C", "D"}``.

Inside a problem file the context is given once, so elements may drop
``m``/``d``, and a plain ``[re, im]`` pair stands for a constant.
"""

from __future__ import annotations

import json
from typing import Any

import jsonschema

from .matrix import RingMatrix
from .rational import Realization, RingPoly, RingRational
from .ring import MultiIndex, RingElement, TruncationContext


class FormatError(ValueError):
    """Input does not match the expected JSON layout."""


_TERM = {
    "type": "object",
    "properties": {
        "index": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
        },
        "re": {"type": "number"},
        "im": {"type": "number"},
    },
    "required": ["index", "re", "im"],
    "additionalProperties": False,
}

_COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

ELEMENT_SCHEMA = {
    "type": "object",
    "properties": {
        "m": {"type": "integer", "minimum": 0},
        "d": {"type": "integer", "minimum": 0},
        "terms": {"type": "array", "items": _TERM},
    },
    "required": ["m", "d", "terms"],
    "additionalProperties": False,
}

_LOOSE_ELEMENT = {
    "oneOf": [
        {**ELEMENT_SCHEMA, "required": ["terms"]},
        _COMPLEX,
    ]
}

MATRIX_SCHEMA = {
    "type": "object",
    "properties": {
        "rows": {"type": "integer", "minimum": 1},
        "cols": {"type": "integer", "minimum": 1},
        "entries": {"type": "array", "items": ELEMENT_SCHEMA},
    },
    "required": ["rows", "cols", "entries"],
    "additionalProperties": False,
}

RATIONAL_SCHEMA = {
    "type": "object",
    "properties": {
        "num": {"type": "array", "items": MATRIX_SCHEMA, "minItems": 1},
        "den": {"type": "array", "items": ELEMENT_SCHEMA, "minItems": 1},
    },
    "required": ["num", "den"],
    "additionalProperties": False,
}

REALIZATION_SCHEMA = {
    "type": "object",
    "properties": {k: MATRIX_SCHEMA for k in "ABCD"},
    "required": list("ABCD"),
    "additionalProperties": False,
}

OPTION_KEYS = ("k_report", "tol", "grid", "radius", "eps_schur", "eps_pd", "nodes")

PROBLEM_SCHEMA = {
    "type": "object",
    "properties": {
        "context": {
            "type": "object",
            "properties": {"m": {"type": "integer", "minimum": 0}, "d": {"type": "integer", "minimum": 0}},
            "required": ["m", "d"],
            "additionalProperties": False,
        },
        "points": {"type": "array", "items": _LOOSE_ELEMENT, "minItems": 1},
        "targets": {"type": "array", "items": _LOOSE_ELEMENT, "minItems": 1},
        "parameter": {"type": "array", "items": _LOOSE_ELEMENT, "minItems": 1},
        "options": {
            "type": "object",
            "properties": {
                "k_report": {"type": "number", "exclusiveMinimum": 0},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "grid": {"type": "integer", "minimum": 8},
                "radius": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "eps_schur": {"type": "number", "exclusiveMinimum": 0},
                "eps_pd": {"type": "number", "exclusiveMinimum": 0},
                "nodes": {"type": "integer", "minimum": 64},
            },
            "additionalProperties": False,
        },
    },
    "required": ["context", "points", "targets"],
    "additionalProperties": False,
}

PARAMETER_SCHEMA = {"type": "array", "items": _LOOSE_ELEMENT, "minItems": 1}


def validate(obj: Any, schema: dict, what: str) -> None:
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise FormatError(f"invalid {what} at {path}: {exc.message}") from None


def element_to_dict(F: RingElement) -> dict:
    return {
        "m": F.context.num_vars,
        "d": F.context.degree_cap,
        "terms": [
            {"index": [list(p) for p in alpha.entries], "re": c.real, "im": c.imag}
            for alpha, c in F.coeffs.items()
        ],
    }


def _terms_to_element(ctx: TruncationContext, terms: list) -> RingElement:
    coeffs: dict[MultiIndex, complex] = {}
    for t in terms:
        try:
            alpha = MultiIndex.from_pairs(t["index"])
        except ValueError as exc:
            raise FormatError(str(exc)) from None
        if not ctx.admits(alpha):
            raise FormatError(f"multi-index {alpha} not admitted by context {ctx}")
        coeffs[alpha] = coeffs.get(alpha, 0) + complex(t["re"], t["im"])
    return RingElement(ctx, coeffs)


def element_from_dict(obj: Any, ctx: TruncationContext | None = None) -> RingElement:
    """Strict element reader; ``ctx`` enables the loose problem-file forms."""
    if ctx is None:
        validate(obj, ELEMENT_SCHEMA, "element")
        return _terms_to_element(TruncationContext(obj["m"], obj["d"]), obj["terms"])
    validate(obj, _LOOSE_ELEMENT, "element")
    if isinstance(obj, list):
        return ctx.const(complex(obj[0], obj[1]))
    if ("m" in obj and obj["m"] != ctx.num_vars) or ("d" in obj and obj["d"] != ctx.degree_cap):
        raise FormatError(f"element context ({obj.get('m')}, {obj.get('d')}) differs from {ctx}")
    return _terms_to_element(ctx, obj["terms"])


def matrix_to_dict(M: RingMatrix) -> dict:
    return {
        "rows": M.rows,
        "cols": M.cols,
        "entries": [element_to_dict(M[i, j]) for i in range(M.rows) for j in range(M.cols)],
    }


def _matrix(obj: dict) -> RingMatrix:
    entries = [element_from_dict(e) for e in obj["entries"]]
    rows, cols = obj["rows"], obj["cols"]
    if len(entries) != rows * cols:
        raise FormatError(f"matrix declares {rows}x{cols} but has {len(entries)} entries")
    ctxs = {e.context for e in entries}
    if len(ctxs) != 1:
        raise FormatError("matrix entries use different contexts")
    return RingMatrix(ctxs.pop(), [entries[i * cols : (i + 1) * cols] for i in range(rows)])


def matrix_from_dict(obj: Any) -> RingMatrix:
    validate(obj, MATRIX_SCHEMA, "matrix")
    return _matrix(obj)


def rational_to_dict(F: RingRational) -> dict:
    return {
        "num": [matrix_to_dict(M) for M in F.num.coeffs],
        "den": [element_to_dict(M[0, 0]) for M in F.den.coeffs],
    }


def rational_from_dict(obj: Any) -> RingRational:
    validate(obj, RATIONAL_SCHEMA, "rational")
    num = [_matrix(m) for m in obj["num"]]
    den = [element_from_dict(e) for e in obj["den"]]
    ctxs = {x.context for x in num + den}
    if len(ctxs) != 1:
        raise FormatError("rational coefficients use different contexts")
    ctx = ctxs.pop()
    try:
        return RingRational(RingPoly(ctx, num), RingPoly(ctx, den))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def realization_to_dict(R: Realization) -> dict:
    return {k: matrix_to_dict(getattr(R, k)) for k in "ABCD"}


def realization_from_dict(obj: Any) -> Realization:
    validate(obj, REALIZATION_SCHEMA, "realization")
    try:
        return Realization(*(_matrix(obj[k]) for k in "ABCD"))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def to_dict(obj) -> dict:
    if isinstance(obj, RingElement):
        return element_to_dict(obj)
    if isinstance(obj, RingMatrix):
        return matrix_to_dict(obj)
    if isinstance(obj, RingRational):
        return rational_to_dict(obj)
    if isinstance(obj, Realization):
        return realization_to_dict(obj)
    raise TypeError(f"no serialization for {type(obj).__name__}")


def from_dict(obj: Any):
    """Dispatch on the top-level keys of a serialized object."""
    if not isinstance(obj, dict):
        raise FormatError("expected a JSON object")
    if "terms" in obj:
        return element_from_dict(obj)
    if "entries" in obj:
        return matrix_from_dict(obj)
    if "num" in obj:
        return rational_from_dict(obj)
    if "A" in obj:
        return realization_from_dict(obj)
    raise FormatError("unrecognised object: expected element, matrix, rational or realization")


def dumps(obj: Any) -> str:
    """Canonical JSON text (sorted keys, fixed separators, trailing newline)."""
    return json.dumps(obj, sort_keys=True, indent=1, separators=(",", ": ")) + "\n"
