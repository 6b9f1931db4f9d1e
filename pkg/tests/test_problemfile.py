import json

import numpy as np
import pytest

from geqn.errors import ProblemFormatError
from geqn.problemfile import dumps, load, loads, to_dict
from geqn.registry import registry_dir

SQRT1 = {
    "n": 1,
    "poly": [{"component": 0, "exponents": [2], "coefficient": 1}, {"component": 0, "exponents": [0], "coefficient": -1}],
    "set": {"type": "orthant"},
    "solution": [1.0],
    "kappa": 10,
}


def text(**changes):
    obj = dict(SQRT1, **changes)
    return json.dumps({k: v for k, v in obj.items() if v is not None})


def test_sqrt1_loads():
    prob = load(registry_dir() / "sqrt1.geqn")
    assert prob.n == 1 and prob.cset.kind == "orthant" and prob.kappa == 10
    assert prob.solution == pytest.approx([1.0])
    assert prob.jac(np.array([3.0])) == pytest.approx(np.array([[6.0]]))


@pytest.mark.parametrize("path", sorted(registry_dir().glob("*.geqn")), ids=lambda p: p.stem)
def test_registry_round_trip(path):
    prob = load(path)
    again = loads(dumps(prob))
    assert to_dict(again) == to_dict(prob)
    assert again.poly == prob.poly and again.cset == prob.cset
    assert to_dict(prob) == _normalized(json.loads(path.read_text()))


def _normalized(obj):
    def num(v):
        return float(v) if isinstance(v, str) else v

    out = {k: obj[k] for k in ("name", "description") if obj.get(k)}
    out["n"] = obj["n"]
    terms = {(t["component"], tuple(t["exponents"])): t["coefficient"] for t in obj["poly"]}
    out["poly"] = [{"component": c, "exponents": list(e), "coefficient": v} for (c, e), v in sorted(terms.items())]
    s = dict(obj["set"])
    for key in ("lower", "upper", "b"):
        if key in s:
            s[key] = [num(v) for v in s[key]]
    if "A" in s:
        s["A"] = [[num(v) for v in row] for row in s["A"]]
    out["set"] = s
    if "solution" in obj:
        out["solution"] = obj["solution"]
    out["kappa"] = obj.get("kappa", "inf")
    return json.loads(json.dumps(out).replace('"inf"', "Infinity").replace('"-inf"', "-Infinity"))


def test_infinite_bounds_round_trip():
    prob = loads(text(set={"type": "box", "lower": ["-inf"], "upper": [2]}, kappa="inf"))
    d = to_dict(prob)
    assert d["set"]["lower"] == ["-inf"] and d["kappa"] == "inf"
    assert loads(dumps(prob)).cset == prob.cset


def test_polyhedron_set():
    prob = loads(text(set={"type": "polyhedron", "A": [[-1]], "b": [0]}))
    assert prob.cset.kind == "polyhedron"


@pytest.mark.parametrize(
    "source, message",
    [
        (text(set={"type": "cone"}), "unknown set type"),
        (text(solution=[1.15]), "solution residual 3.2e-01 > 1e-10"),
        (text(n=None), "missing field"),
        (text(extra=1), "unknown field"),
        (text(solution=[1.0, 2.0]), "dimension mismatch"),
        (text(poly=[{"component": 0, "exponents": [2, 1], "coefficient": 1}]), "poly[0].exponents"),
        (text(poly=[{"component": 3, "exponents": [2], "coefficient": 1}]), "poly[0].component"),
        (text(poly=[{"component": 0, "exponents": [2]}]), "malformed polynomial term"),
        (text(set={"type": "box", "lower": [0]}), "missing ['upper']"),
        (text(kappa=-1), "kappa"),
        (text(n=True), "positive integer"),
    ],
)
def test_format_errors(source, message):
    with pytest.raises(ProblemFormatError) as info:
        loads(source)
    assert message in str(info.value)


def test_syntax_error_names_line():
    with pytest.raises(ProblemFormatError, match="line 3 column"):
        loads('{\n  "n": 1,\n  "poly": [,\n}')


def test_validation_can_be_skipped():
    prob = loads(text(solution=[1.15]), validate=False)
    assert prob.solution == pytest.approx([1.15])
