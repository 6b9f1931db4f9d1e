import math

import numpy as np
import pytest

from geqn import MajorantSpec, Polynomial, ProblemInstance, SetDescriptor
from geqn.checks import (
    check_majorant_inequality,
    check_second_derivative_bounds,
    check_taylor_bound,
    extremal_problem,
    fit_lipschitz,
    multilinear_norm,
    smale_gamma,
)
from geqn.errors import PreconditionError, UnsupportedError
from geqn.newton import solve


def scalar(terms, solution, kappa=10.0):
    return ProblemInstance.from_polynomial(Polynomial(1, terms), SetDescriptor.zero(1), solution, kappa)


@pytest.fixture
def affine2():
    p = Polynomial(2, [(0, [1, 0], 2), (0, [0, 1], 1), (1, [1, 0], 1), (1, [0, 1], 2), (0, [0, 0], -3), (1, [0, 0], -3)])
    return ProblemInstance.from_polynomial(p, SetDescriptor.zero(2), [1.0, 1.0], kappa=5.0)


def test_center_sample_has_zero_slack(sqrt_zero):
    rep = check_majorant_inequality(sqrt_zero, MajorantSpec.holder(3, 1, lam=0.5), samples=1)
    assert rep.passed and rep.max_violation == 0.0


def test_loose_constant_fails_at_tau_zero(sqrt_zero):
    rep = check_majorant_inequality(sqrt_zero, MajorantSpec.holder(0.5, 1, lam=0.5), samples=200)
    assert not rep.passed and rep.worst[1] == 0.0
    assert "FAIL" in rep.summary()


def test_affine_always_passes(affine2):
    for spec in (MajorantSpec.holder(0.1, 1), MajorantSpec.smale(0.3)):
        assert check_taylor_bound(affine2, spec, samples=100).passed
        assert check_majorant_inequality(affine2, spec, samples=100, taus=5).passed
        assert check_second_derivative_bounds(affine2, spec, samples=50).passed


def test_second_derivative_preconditions(sqrt_zero):
    with pytest.raises(PreconditionError):
        check_second_derivative_bounds(sqrt_zero, MajorantSpec.holder(1, 0.5))
    bare = ProblemInstance(n=1, f=sqrt_zero.f, jac=sqrt_zero.jac, cset=SetDescriptor.zero(1), solution=np.ones(1))
    with pytest.raises(UnsupportedError):
        check_second_derivative_bounds(bare, MajorantSpec.smale(0.5))


def test_infinite_radius_needs_explicit_radius(sqrt_zero):
    prob = scalar([(0, [2], 1), (0, [0], -1)], [1.0], kappa=math.inf)
    with pytest.raises(PreconditionError):
        check_taylor_bound(prob, MajorantSpec.holder(1, 1))
    assert check_taylor_bound(prob, MajorantSpec.holder(1, 1, lam=0.5), radius=2.0, samples=50).passed


def test_fit_lipschitz():
    sq = scalar([(0, [2], 1), (0, [0], -1)], [1.0])
    assert fit_lipschitz(sq, [1.0], 0.5, samples=200) == pytest.approx(2.0, abs=1e-6)
    cube = scalar([(0, [3], 1), (0, [0], -1)], [1.0])
    assert fit_lipschitz(cube, [1.0], 0.5, samples=200) == pytest.approx(9.0, abs=1e-9)
    with pytest.raises(ValueError):
        fit_lipschitz(sq, [1.0], 0.0)


def test_fit_lipschitz_affine(affine2):
    assert fit_lipschitz(affine2, [1.0, 1.0], 1.0, samples=100) == 0.0


def test_smale_gamma():
    sq = scalar([(0, [2], 1), (0, [0], -1)], [1.0])
    assert smale_gamma(sq, 0.5) == pytest.approx(0.5)
    cube = scalar([(0, [3], 1), (0, [0], -1)], [1.0])
    assert smale_gamma(cube, 1 / 3) == pytest.approx(1.0)


def test_smale_gamma_affine(affine2):
    assert smale_gamma(affine2, 1.0) == 0.0


def test_multilinear_norm():
    assert multilinear_norm(np.array([[3.0, 4.0]])) == pytest.approx(5.0)
    T = np.zeros((1, 2, 2))
    T[0] = [[1.0, 0.0], [0.0, -3.0]]
    assert multilinear_norm(T) == pytest.approx(3.0)
    # f(x, y) = (x^2, y^2): ||(u1^2, u2^2)|| is largest on the axes.
    T = np.zeros((2, 2, 2))
    T[0, 0, 0] = T[1, 1, 1] = 2.0
    assert multilinear_norm(T) == pytest.approx(2.0, rel=1e-9)
    T3 = np.zeros((1, 3, 3, 3))
    T3[0, 0, 0, 0] = 6.0
    assert multilinear_norm(T3) == pytest.approx(6.0, rel=1e-6)


def test_extremal_problem_examples():
    spec = MajorantSpec.holder(1, 1)
    prob = extremal_problem(spec)
    assert prob.f(np.array([0.5]))[0] == pytest.approx(0.5 * 0.5 / 2 - 0.5)
    assert prob.f(np.array([-0.5]))[0] == pytest.approx(-(0.5 * 0.5 / 2 - 0.5))
    tr = solve(prob, [0.5], spec=spec)
    assert tr.iterates[1][0] == pytest.approx(-0.25)
    assert solve(prob, [0.0]).iterations == 0
    assert check_majorant_inequality(prob, spec, samples=200, radius=0.9).max_violation <= 1e-12


def test_extremal_requires_unit_lambda():
    with pytest.raises(ValueError):
        extremal_problem(MajorantSpec.holder(1, 1, lam=0.5))
