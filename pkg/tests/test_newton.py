import io
import math
from fractions import Fraction

import numpy as np
import pytest

from geqn import MajorantSpec, Polynomial, ProblemInstance, SetDescriptor
from geqn.checks import extremal_problem
from geqn.errors import PreconditionError, UnsupportedError
from geqn.newton import (
    CONVERGED,
    DIVERGED,
    MAX_ITER,
    SUBPROBLEM_FAILURE,
    OrderUndetermined,
    SolverConfig,
    certify,
    estimate_order,
    solve,
    uniqueness_scan,
)

NEWTON_SQRT = [1.5, 1.0833333, 1.0032051, 1.0000051]


def test_classical_newton(sqrt_zero):
    tr = solve(sqrt_zero, [1.5])
    assert tr.status == CONVERGED and tr.iterations <= 5
    assert [x[0] for x in tr.iterates[:4]] == pytest.approx(NEWTON_SQRT, abs=1e-7)
    assert tr.iterates[4][0] - 1 == pytest.approx(1.31e-11, rel=0.01)


def test_orthant_iterates_match_zero_map(sqrt_zero, sqrt_orthant):
    a = solve(sqrt_zero, [1.5])
    b = solve(sqrt_orthant, [1.5])
    assert np.allclose(np.ravel(a.iterates), np.ravel(b.iterates), atol=1e-15, rtol=0)


@pytest.mark.parametrize("cset", [SetDescriptor.zero(2), SetDescriptor.orthant(2), SetDescriptor.box([0, 0], [5, 5])])
def test_affine_converges_in_one_step(cset):
    p = Polynomial(2, [(0, [1, 0], 2), (0, [0, 1], 1), (0, [0, 0], -5), (1, [1, 0], 1), (1, [0, 1], 2), (1, [0, 0], -6)])
    prob = ProblemInstance.from_polynomial(p, cset, [4 / 3, 7 / 3])
    tr = solve(prob, [3.0, 0.5])
    assert tr.status == CONVERGED and tr.iterations == 1


def test_failure_statuses(sqrt_orthant, sqrt_zero):
    assert solve(sqrt_orthant, [-5.0]).status == SUBPROBLEM_FAILURE
    assert solve(sqrt_zero, [0.0]).status == SUBPROBLEM_FAILURE
    tr = solve(sqrt_zero, [1e-9], SolverConfig(divergence_radius=10))
    assert tr.status == DIVERGED and "left the ball" in tr.message
    assert solve(sqrt_zero, [1.5], SolverConfig(max_iter=2)).status == MAX_ITER


def test_bad_start_shape(sqrt_zero):
    with pytest.raises(ValueError):
        solve(sqrt_zero, [1.0, 2.0])


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(max_iter=0)


def test_estimate_order(sqrt_zero):
    assert estimate_order(solve(sqrt_zero, [1.5])) == pytest.approx(2.0, abs=0.2)
    assert estimate_order([2.0**-k for k in range(40)]) == pytest.approx(1.0, abs=0.05)
    with pytest.raises(OrderUndetermined, match="order undetermined"):
        estimate_order([0.1, 0.01])
    with pytest.raises(OrderUndetermined):
        estimate_order(solve(ProblemInstance.from_polynomial(Polynomial(1, [(0, [1], 1)]), SetDescriptor.zero(1)), [1.0]))


def test_csv_is_deterministic(sqrt_orthant, lipschitz_spec):
    a = solve(sqrt_orthant, [0.5], spec=lipschitz_spec).to_csv()
    b = solve(sqrt_orthant, [0.5], spec=lipschitz_spec).to_csv()
    assert a == b
    lines = a.splitlines()
    assert lines[0] == "k,x,residual,error,t_k,ratio"
    assert lines[1].startswith("0,0.5,") and lines[2].split(",")[4] == "0.25"


def test_csv_multidim():
    p = Polynomial(2, [(0, [1, 0], 1), (1, [0, 1], 1), (0, [0, 0], -1)])
    prob = ProblemInstance.from_polynomial(p, SetDescriptor.zero(2), [1.0, 0.0])
    buf = io.StringIO()
    solve(prob, [0.25, 0.5]).write_csv(buf)
    assert buf.getvalue().splitlines()[1].split(",")[1] == "0.25;0.5"


def test_certificate_passes(sqrt_zero, lipschitz_spec):
    cert = certify(sqrt_zero, lipschitz_spec, [0.5], samples=200)
    assert cert.passed
    assert cert.trace.errors[1] == pytest.approx(0.25) and cert.trace.envelope[1] == pytest.approx(0.25)
    assert cert.lines()[-1] == "overall: PASS"


def test_certificate_radius_precondition(sqrt_zero, lipschitz_spec):
    cert = certify(sqrt_zero, lipschitz_spec, [0.3], samples=100)
    assert not cert.verdicts["x0 in B(xbar, r)"] and not cert.passed


def test_certificate_at_boundary_records_non_convergence():
    spec = MajorantSpec.holder(1, 1)
    cert = certify(extremal_problem(spec), spec, [Fraction(2, 3)], SolverConfig(exact=True), samples=100)
    assert not cert.passed
    assert cert.trace.status == MAX_ITER and not cert.verdicts["converged"]
    assert not cert.verdicts["x0 in B(xbar, r)"]
    # In floating point the repelling cycle is left after a few steps.
    assert solve(extremal_problem(spec), [2 / 3]).status == CONVERGED


def test_certify_rejects_bad_spec(sqrt_zero):
    bad = MajorantSpec.custom(lambda t: (t * t, 2 * t, 2.0), R=math.inf)
    with pytest.raises(PreconditionError):
        certify(sqrt_zero, bad, [0.5])


def test_uniqueness_examples(sqrt_orthant):
    assert uniqueness_scan(sqrt_orthant, 2 / 3, 10_001).passed
    assert uniqueness_scan(sqrt_orthant, 0.0, 11).passed
    # x (x - 0.1)(x - 0.5) around xbar = 0 hides a root at 0.1.
    p = Polynomial(1, [(0, [3], 1), (0, [2], -0.6), (0, [1], 0.05)])
    planted = ProblemInstance.from_polynomial(p, SetDescriptor.zero(1), [0.0], kappa=1.0)
    rep = uniqueness_scan(planted, 0.6, 10_001)
    assert not rep.passed
    found = sorted(r[0] for r in rep.roots)
    assert found == pytest.approx([0.1, 0.5], abs=1e-6)
    assert "second solution" in rep.summary()


def test_uniqueness_2d():
    p = Polynomial(2, [(0, [1, 0], 1), (1, [0, 2], 1), (1, [0, 1], -0.3)])
    prob = ProblemInstance.from_polynomial(p, SetDescriptor.zero(2), [0.0, 0.0])
    rep = uniqueness_scan(prob, 0.5, 101)
    assert not rep.passed and rep.roots[0] == pytest.approx([0.0, 0.3], abs=1e-5)


def test_uniqueness_limits(sqrt_orthant):
    p = Polynomial(4, [(i, [1 if j == i else 0 for j in range(4)], 1) for i in range(4)])
    prob = ProblemInstance.from_polynomial(p, SetDescriptor.zero(4), np.zeros(4))
    with pytest.raises(UnsupportedError):
        uniqueness_scan(prob, 0.1, 5)
    with pytest.raises(PreconditionError):
        uniqueness_scan(sqrt_orthant, 0.9, 11, spec=MajorantSpec.holder(1, 1, lam=0.5))
