import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geqn import kernels, linalg
from geqn.avi import (
    AVI,
    box_face_enumerate,
    lcp_enumerate,
    lemke,
    linearize,
    polyhedron_enumerate,
    polyhedron_to_lcp,
    solve_avi,
    solve_avi_detailed,
    strong_regularity_modulus,
)
from geqn.errors import NoLocalizedSolution, NotStronglyRegular, PreconditionError, SingularMatrixError
from geqn.sets import SetDescriptor

BACKENDS = sorted(kernels.backends())


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    monkeypatch.setattr(kernels, "_impl", kernels.backends()[request.param])
    return request.param


def box(lo, up):
    return SetDescriptor.box(lo, up)


class TestLemke:
    def test_examples(self, backend):
        assert lemke([[1.0]], [-2.0]).z == pytest.approx([2.0])
        res = lemke([[2.0, 1.0], [1.0, 2.0]], [-5.0, -6.0])
        assert res.solved and res.z == pytest.approx([4 / 3, 7 / 3])

    def test_nonnegative_q_needs_no_pivots(self, backend):
        res = lemke(np.array([[-1.0, 4.0], [2.0, -3.0]]), [0.0, 1.0])
        assert res.solved and res.pivots == 0 and np.all(res.z == 0)

    def test_ray_termination(self, backend):
        # w = -z - 1 has no complementary solution.
        res = lemke([[-1.0]], [-1.0])
        assert res.status == "ray"

    def test_degenerate_lcp(self, backend):
        # Several tied ratios; the lexicographic rule must not cycle.
        M = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, 2.0], [2.0, 0.0, 1.0]])
        res = lemke(M, [-1.0, -1.0, -1.0])
        assert res.solved
        w = M @ res.z - 1.0
        assert np.all(res.z >= -1e-12) and np.all(w >= -1e-12) and abs(res.z @ w) <= 1e-12

    def test_pivot_cap(self, backend):
        with pytest.raises(ValueError):
            lemke([[1.0]], [-1.0], max_pivots=0)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**31), n=st.integers(1, 6))
    def test_agrees_with_enumeration(self, seed, n):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((n, n))
        M, q = A @ A.T + 0.1 * np.eye(n), rng.standard_normal(n)
        sols = lcp_enumerate(M, q)
        assert len(sols) == 1
        assert lemke(M, q).z == pytest.approx(sols[0], abs=1e-8)


def test_backends_agree():
    mods = kernels.backends()
    if len(mods) < 2:
        pytest.skip("compiled backend not built")
    rng = np.random.default_rng(3)
    for n in range(1, 9):
        A = rng.standard_normal((n, n))
        M, q = A @ A.T + np.eye(n), rng.standard_normal(n)
        out = {k: m.lemke(M, q, 10 * 2**n, 1e-12) for k, m in mods.items()}
        assert out["python"][0] == out["compiled"][0]
        assert out["python"][2] == out["compiled"][2]
        assert np.allclose(out["python"][1], out["compiled"][1], atol=1e-12)
        lus = {k: m.lu_factor(M, 1e-12) for k, m in mods.items()}
        assert np.array_equal(lus["python"][1], lus["compiled"][1])
        assert np.allclose(lus["python"][0], lus["compiled"][0], atol=1e-12)


class TestLinalg:
    def test_solve(self, backend):
        A = np.array([[0.0, 2.0], [1.0, 1.0]])
        assert linalg.solve(A, [2.0, 3.0]) == pytest.approx([2.0, 1.0])

    def test_singular(self, backend):
        with pytest.raises(SingularMatrixError):
            linalg.solve(np.array([[1.0, 2.0], [2.0, 4.0]]), [1.0, 1.0])

    def test_inverse_norm(self, backend):
        assert linalg.inverse_norm(np.diag([2.0, 4.0])) == pytest.approx(0.5)


class TestEnumeration:
    def test_lcp_examples(self):
        assert [s.tolist() for s in lcp_enumerate([[1.0]], [-2.0])] == [[2.0]]
        sols = sorted(s[0] for s in lcp_enumerate([[-1.0]], [1.0]))
        assert sols == pytest.approx([0.0, 1.0])
        sols = lcp_enumerate([[2.0, 1.0], [1.0, 2.0]], [-5.0, -6.0])
        assert len(sols) == 1 and sols[0] == pytest.approx([4 / 3, 7 / 3])

    def test_singular_blocks_recorded(self):
        diag = []
        lcp_enumerate(np.zeros((1, 1)), [1.0], diagnostics=diag)
        assert diag and diag[0][0] == "singular"

    @pytest.mark.parametrize("q, want", [(-3.0, 2.0), (-1.0, 1.0), (1.0, 0.0)])
    def test_box_faces(self, q, want):
        sols = box_face_enumerate(AVI(np.array([[1.0]]), np.array([q]), box([0.0], [2.0])))
        assert len(sols) == 1 and sols[0] == pytest.approx([want])

    def test_polyhedron_to_lcp(self):
        avi = AVI(np.array([[1.0]]), np.array([-2.0]), SetDescriptor.polyhedron([[1.0]], [1.0]))
        Mp, qp, recover = polyhedron_to_lcp(avi)
        assert Mp == pytest.approx(np.array([[1.0]])) and qp == pytest.approx([-1.0])
        mu = lemke(Mp, qp).z
        assert mu == pytest.approx([1.0]) and recover(mu) == pytest.approx([1.0])

        inactive = AVI(np.array([[1.0]]), np.array([-0.5]), SetDescriptor.polyhedron([[1.0]], [1.0]))
        Mp, qp, recover = polyhedron_to_lcp(inactive)
        mu = lemke(Mp, qp).z
        assert mu == pytest.approx([0.0]) and recover(mu) == pytest.approx([0.5])

    def test_polyhedron_enumeration_matches_kkt(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            n, m = 2, 4
            A = rng.standard_normal((m, n))
            b = A @ rng.standard_normal(n) + 0.5
            G = rng.standard_normal((n, n))
            avi = AVI(G @ G.T + np.eye(n), rng.standard_normal(n), SetDescriptor.polyhedron(A, b))
            Mp, qp, recover = polyhedron_to_lcp(avi)
            sols = polyhedron_enumerate(avi)
            assert len(sols) == 1
            assert recover(lemke(Mp, qp).z) == pytest.approx(sols[0], abs=1e-8)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**31))
    def test_box_solution_is_complementary(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 4))
        lo = rng.uniform(-1, 0, n)
        up = lo + rng.uniform(0.1, 2, n)
        G = rng.standard_normal((n, n))
        avi = AVI(G @ G.T + 0.1 * np.eye(n), 2 * rng.standard_normal(n), box(lo, up))
        (z,) = box_face_enumerate(avi)
        assert avi.residual(z) <= 1e-9


class TestSolveAvi:
    def test_examples(self):
        assert solve_avi(AVI(np.array([[2.0]]), np.array([-2.0]), SetDescriptor.zero(1)), [0.0]) == pytest.approx([1.0])
        assert solve_avi(AVI(np.array([[3.0]]), np.array([-3.25]), SetDescriptor.orthant(1)), [1.5]) == pytest.approx([3.25 / 3])
        det = solve_avi_detailed(AVI(np.array([[-1.0]]), np.array([1.0]), SetDescriptor.orthant(1)), [0.9])
        assert det.z == pytest.approx([1.0]) and det.ambiguous

    def test_nearest_tie_is_lexicographic(self):
        det = solve_avi_detailed(AVI(np.array([[-1.0]]), np.array([1.0]), SetDescriptor.orthant(1)), [0.5])
        assert det.z == pytest.approx([0.0])

    def test_localization(self):
        avi = AVI(np.array([[-1.0]]), np.array([1.0]), SetDescriptor.orthant(1))
        assert solve_avi(avi, [0.0], localization=([1.0], 0.1)) == pytest.approx([1.0])
        with pytest.raises(NoLocalizedSolution):
            solve_avi(avi, [0.0], localization=([0.5], 0.1))

    def test_linearize(self, sqrt_orthant, sqrt_zero):
        avi = linearize(sqrt_orthant, np.array([1.5]))
        assert avi.M == pytest.approx(np.array([[3.0]])) and avi.q == pytest.approx([-3.25])
        avi = linearize(sqrt_zero, np.array([1.0]))
        assert solve_avi(avi, [1.0]) == pytest.approx([1.0])

    def test_singular_zero_map(self):
        with pytest.raises(SingularMatrixError):
            solve_avi(AVI(np.zeros((1, 1)), np.array([1.0]), SetDescriptor.zero(1)), [0.0])


class TestStrongRegularity:
    def test_zero_map(self):
        avi = AVI(np.array([[2.0]]), np.array([-2.0]), SetDescriptor.zero(1))
        assert strong_regularity_modulus(avi, [1.0]) == pytest.approx(0.5)

    def test_strict_complementarity(self):
        avi = AVI(np.diag([2.0, 3.0]), np.array([-2.0, 1.0]), SetDescriptor.orthant(2))
        assert strong_regularity_modulus(avi, [1.0, 0.0]) == pytest.approx(0.5)

    def test_degenerate_pieces(self):
        avi = AVI(np.array([[1.0]]), np.array([0.0]), SetDescriptor.orthant(1))
        assert strong_regularity_modulus(avi, [0.0]) == pytest.approx(1.0)

    def test_orientation_mismatch(self):
        # Degenerate at 0 with M = -1: the free piece has det -1, the fixed piece det +1.
        avi = AVI(np.array([[-1.0]]), np.array([0.0]), SetDescriptor.orthant(1))
        with pytest.raises(NotStronglyRegular):
            strong_regularity_modulus(avi, [0.0])

    def test_requires_solution(self):
        avi = AVI(np.array([[1.0]]), np.array([-1.0]), SetDescriptor.orthant(1))
        with pytest.raises(PreconditionError):
            strong_regularity_modulus(avi, [3.0])


def test_pure_python_switch():
    env = dict(os.environ, GEQN_PURE_PYTHON="1")
    code = "import geqn; print(geqn.BACKEND); print(geqn.lemke([[2.0, 1.0], [1.0, 2.0]], [-5.0, -6.0]).z)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    assert out.splitlines()[0] == "python"
