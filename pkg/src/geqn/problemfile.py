"""Reading and writing ``.geqn`` problem files.

A problem file is a JSON object::

    {
      "name": "sqrt1",                       (optional)
      "description": "...",                  (optional)
      "n": 1,
      "poly": [{"component": 0, "exponents": [2], "coefficient": 1},
               {"component": 0, "exponents": [0], "coefficient": -1}],
      "set": {"type": "orthant"},
      "solution": [1.0],                     (optional)
      "kappa": 10                            (optional, default "inf")
    }

``set.type`` is one of ``zero``, ``orthant``, ``box`` (with ``lower`` and
``upper``; entries may be ``"-inf"``/``"inf"``) or ``polyhedron`` (with
``A`` and ``b`` describing ``A x <= b``). See ``docs/problem-format.md``.
"""

import json
import math
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import ProblemFormatError
from .polynomial import Polynomial
from .problem import ProblemInstance
from .sets import SetDescriptor

REQUIRED = {"n", "poly", "set"}
OPTIONAL = {"solution", "kappa", "name", "description"}
SET_FIELDS = {
    "zero": set(),
    "orthant": set(),
    "box": {"lower", "upper"},
    "polyhedron": {"A", "b"},
}
TERM_FIELDS = {"component", "exponents", "coefficient"}


def _real(value, field):
    if isinstance(value, str) and value in ("inf", "+inf", "-inf"):
        return float(value)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProblemFormatError(f"field {field!r}: expected a number, got {value!r}")
    return value


def _vector(value, field, length=None):
    if not isinstance(value, list):
        raise ProblemFormatError(f"field {field!r}: expected a list")
    out = [_real(v, f"{field}[{i}]") for i, v in enumerate(value)]
    if length is not None and len(out) != length:
        raise ProblemFormatError(f"field {field!r}: dimension mismatch, expected {length} entries, got {len(out)}")
    return out


def _parse_set(obj, n):
    if not isinstance(obj, dict) or "type" not in obj:
        raise ProblemFormatError("field 'set': expected an object with a 'type'")
    kind = obj["type"]
    if kind not in SET_FIELDS:
        raise ProblemFormatError(f"field 'set.type': unknown set type {kind!r}")
    keys = set(obj) - {"type"}
    if keys != SET_FIELDS[kind]:
        extra, missing = keys - SET_FIELDS[kind], SET_FIELDS[kind] - keys
        raise ProblemFormatError(f"field 'set': {kind} set has extra {sorted(extra)} / missing {sorted(missing)} fields")
    if kind == "zero":
        return SetDescriptor.zero(n)
    if kind == "orthant":
        return SetDescriptor.orthant(n)
    try:
        if kind == "box":
            return SetDescriptor.box(_vector(obj["lower"], "set.lower", n), _vector(obj["upper"], "set.upper", n))
        if not isinstance(obj["A"], list) or not obj["A"]:
            raise ProblemFormatError("field 'set.A': expected a non-empty list of rows")
        A = [_vector(row, f"set.A[{i}]", n) for i, row in enumerate(obj["A"])]
        b = _vector(obj["b"], "set.b", len(A))
        return SetDescriptor.polyhedron(A, b)
    except ValueError as exc:
        if isinstance(exc, ProblemFormatError):
            raise
        raise ProblemFormatError(f"field 'set': {exc}") from None


def _parse_poly(terms, n):
    if not isinstance(terms, list):
        raise ProblemFormatError("field 'poly': expected a list of terms")
    out = []
    for i, t in enumerate(terms):
        where = f"poly[{i}]"
        if not isinstance(t, dict) or set(t) != TERM_FIELDS:
            raise ProblemFormatError(f"field {where!r}: malformed polynomial term, expected keys {sorted(TERM_FIELDS)}")
        comp, exps = t["component"], t["exponents"]
        if isinstance(comp, bool) or not isinstance(comp, int) or not 0 <= comp < n:
            raise ProblemFormatError(f"field '{where}.component': must be an integer in [0, {n})")
        if (
            not isinstance(exps, list)
            or len(exps) != n
            or any(isinstance(e, bool) or not isinstance(e, int) or e < 0 for e in exps)
        ):
            raise ProblemFormatError(f"field '{where}.exponents': need {n} nonnegative integers")
        coef = _real(t["coefficient"], f"{where}.coefficient")
        if not math.isfinite(coef):
            raise ProblemFormatError(f"field '{where}.coefficient': must be finite")
        out.append((comp, exps, coef))
    return Polynomial(n, out)


def loads(text, validate=True, source="<string>"):
    """Parse problem-file text into a validated :class:`ProblemInstance`."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ProblemFormatError(f"{source}: top level must be an object")
    keys = set(obj)
    if REQUIRED - keys:
        raise ProblemFormatError(f"{source}: missing field(s) {sorted(REQUIRED - keys)}")
    if keys - REQUIRED - OPTIONAL:
        raise ProblemFormatError(f"{source}: unknown field(s) {sorted(keys - REQUIRED - OPTIONAL)}")
    n = obj["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ProblemFormatError(f"{source}: field 'n' must be a positive integer")
    poly = _parse_poly(obj["poly"], n)
    cset = _parse_set(obj["set"], n)
    solution = None
    if obj.get("solution") is not None:
        solution = np.array(_vector(obj["solution"], "solution", n), dtype=float)
    kappa = float(_real(obj.get("kappa", "inf"), "kappa"))
    if not kappa > 0:
        raise ProblemFormatError(f"{source}: field 'kappa' must be positive")
    prob = ProblemInstance.from_polynomial(poly, cset, solution, kappa, name=obj.get("name", ""), validate=False)
    if "description" in obj:
        prob = replace(prob, meta={"description": obj["description"]})
    if validate:
        try:
            prob.validate()
        except ValueError as exc:
            raise ProblemFormatError(f"{source}: validation error: {exc}") from None
    return prob


def load(path, validate=True):
    path = Path(path)
    return loads(path.read_text(), validate=validate, source=str(path))


def _num(v):
    v = float(v) if not isinstance(v, int) else v
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def to_dict(problem):
    """Normalized file object for a polynomial problem."""
    if problem.poly is None:
        raise ValueError("only polynomial problems can be serialized")
    s = problem.cset
    cset = {"type": s.kind}
    if s.kind == "box":
        cset["lower"] = [_num(v) for v in s.lower]
        cset["upper"] = [_num(v) for v in s.upper]
    elif s.kind == "polyhedron":
        cset["A"] = [[_num(v) for v in row] for row in s.A]
        cset["b"] = [_num(v) for v in s.b]
    obj = {}
    if problem.name:
        obj["name"] = problem.name
    if problem.meta.get("description"):
        obj["description"] = problem.meta["description"]
    obj["n"] = problem.n
    obj["poly"] = [
        {"component": c, "exponents": list(e), "coefficient": _num(v)} for c, e, v in problem.poly.terms
    ]
    obj["set"] = cset
    if problem.solution is not None:
        obj["solution"] = [_num(v) for v in problem.solution]
    obj["kappa"] = _num(problem.kappa)
    return obj


def dumps(problem):
    return json.dumps(to_dict(problem), indent=2) + "\n"


def dump(problem, path):
    Path(path).write_text(dumps(problem))
