"""Sampling checks that tie a problem ``f`` to a majorant ``psi``.

All checkers draw points uniformly from a ball around the known solution
with a seeded generator. They certify a violation exactly, and success
only up to sampling.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from . import majorant
from .errors import PreconditionError, UnsupportedError
from .problem import ProblemInstance, linearization_error
from .sets import SetDescriptor

DEFAULT_SAMPLES = 2000
DEFAULT_TAUS = 33
DEFAULT_SEED = 0


@dataclass
class InequalityReport:
    """Outcome of a sampled inequality ``lhs <= rhs``.

    ``max_violation`` is the largest ``lhs - rhs`` seen; ``worst`` is the
    sample where it occurred, ``(x, tau)`` or ``(x,)``.
    """

    name: str
    samples: int
    max_violation: float
    worst: tuple
    passed: bool

    def summary(self):
        verdict = "pass" if self.passed else "FAIL"
        return f"{self.name}: {verdict} (samples={self.samples}, max violation={self.max_violation:.3e})"


def ball_samples(center, radius, count, rng):
    """``count`` points uniform in the open ball, the center first."""
    center = np.asarray(center, dtype=float)
    n = center.size
    if count <= 0:
        return center[None, :]
    dirs = rng.standard_normal((count - 1, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = radius * rng.uniform(0.0, 1.0, count - 1) ** (1.0 / n)
    return np.vstack([center, center + dirs * radii[:, None]])


def _sample_radius(problem, spec, radius, shrink=0.0):
    if radius is None:
        radius = min(problem.kappa, spec.R) * (1.0 - shrink)
    if not math.isfinite(radius):
        raise PreconditionError("sampling radius min(kappa, R) is infinite; pass radius explicitly")
    return radius


def _operator_norms(mats):
    mats = np.asarray(mats, dtype=float)
    if mats.shape[-1] == 1 and mats.shape[-2] == 1:
        return np.abs(mats[..., 0, 0])
    return np.linalg.norm(mats, ord=2, axis=(-2, -1))


def check_majorant_inequality(problem, spec, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED, taus=DEFAULT_TAUS, radius=None):
    """Sample ``lambda ||f'(x) - f'(xbar + tau (x - xbar))|| <= psi'(d) - psi'(tau d)``.

    ``d = ||x - xbar||``, ``x`` in ``B(xbar, min(kappa, R))`` and ``tau`` on a
    uniform grid of ``[0, 1]``. Passes when every violation is at most
    ``1e-9 + 1e-9 * scale``.
    """
    xbar = problem.require_solution()
    radius = _sample_radius(problem, spec, radius)
    rng = np.random.default_rng(seed)
    tau_grid = np.linspace(0.0, 1.0, taus)
    worst_v, worst, ok = -math.inf, None, True
    for x in ball_samples(xbar, radius, samples, rng):
        d = float(np.linalg.norm(x - xbar))
        J = np.asarray(problem.jac(x), dtype=float)
        diffs = [J - np.asarray(problem.jac(xbar + t * (x - xbar)), dtype=float) for t in tau_grid]
        lhs = spec.lam * _operator_norms(diffs)
        dd = majorant.dpsi(spec, d)
        rhs = np.array([dd - majorant.dpsi(spec, t * d) for t in tau_grid])
        viol = lhs - rhs
        tol = 1e-9 + 1e-9 * np.maximum(np.abs(lhs), np.abs(rhs))
        ok &= bool(np.all(viol <= tol))
        i = int(np.argmax(viol))
        if viol[i] > worst_v:
            worst_v, worst = float(viol[i]), (x.copy(), float(tau_grid[i]))
    return InequalityReport("majorant inequality", samples, worst_v, worst, ok)


def check_taylor_bound(problem, spec, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED, radius=None):
    """Sample ``lambda ||E_f(x, xbar)|| <= e_psi(||x - xbar||, 0)``."""
    xbar = problem.require_solution()
    radius = _sample_radius(problem, spec, radius)
    rng = np.random.default_rng(seed)
    worst_v, worst, ok = -math.inf, None, True
    for x in ball_samples(xbar, radius, samples, rng):
        d = float(np.linalg.norm(x - xbar))
        lhs = spec.lam * float(np.linalg.norm(np.asarray(linearization_error(problem, x, xbar), dtype=float)))
        rhs = majorant.e_psi(spec, d, 0.0)
        v = lhs - rhs
        ok &= v <= 1e-9 * (1.0 + max(abs(lhs), abs(rhs)))
        if v > worst_v:
            worst_v, worst = v, (x.copy(),)
    return InequalityReport("taylor bound", samples, worst_v, worst, bool(ok))


def _hessian(problem):
    if problem.hess is not None:
        return problem.hess
    if problem.poly is not None:
        return problem.poly.hessian
    raise UnsupportedError("second derivatives unavailable: problem has neither hess nor poly")


def check_second_derivative_bounds(problem, spec, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED, radius=None):
    """Sample ``lambda ||f''(x)|| <= psi''(||x - xbar||)``.

    Points come from ``B(xbar, min(kappa, R) (1 - 1e-6))``; the bilinear norm
    is :func:`multilinear_norm`.
    """
    hess = _hessian(problem)
    if spec.form == "holder" and spec.p != 1:
        raise PreconditionError("second-derivative bound needs psi'' finite: use Smale or Hoelder p=1")
    xbar = problem.require_solution()
    radius = _sample_radius(problem, spec, radius, shrink=1e-6)
    rng = np.random.default_rng(seed)
    worst_v, worst, ok = -math.inf, None, True
    for x in ball_samples(xbar, radius, samples, rng):
        d = float(np.linalg.norm(x - xbar))
        lhs = spec.lam * multilinear_norm(hess(x))
        rhs = majorant.eval_psi(spec, d)[2]
        v = lhs - rhs
        ok &= v <= 1e-9 * (1.0 + max(abs(lhs), abs(rhs)))
        if v > worst_v:
            worst_v, worst = v, (x.copy(),)
    return InequalityReport("second-derivative bound", samples, worst_v, worst, bool(ok))


# multilinear norms -----------------------------------------------------------


def _apply(T, u):
    out = T
    for _ in range(T.ndim - 1):
        out = out @ u
    return out


def multilinear_norm(T, seed=0):
    """Norm of a symmetric multilinear map ``T`` of shape ``(m,) + (n,) * k``.

    For symmetric maps the norm equals ``max ||T(u, ..., u)||`` over unit
    ``u``, which is maximized directly: exactly for ``n = 1`` and for scalar
    quadratic forms, by a direction grid refined with local ascent otherwise.
    """
    T = np.asarray(T, dtype=float)
    k = T.ndim - 1
    n = T.shape[-1] if k else 1
    if k == 0:
        return float(np.linalg.norm(T))
    if n == 1:
        return float(np.linalg.norm(T.reshape(-1)))
    if k == 1:
        return float(np.linalg.norm(T, 2))
    if k == 2 and T.shape[0] == 1:
        S = 0.5 * (T[0] + T[0].T)
        return float(np.abs(np.linalg.eigvalsh(S)).max())

    def value(u):
        nu = np.linalg.norm(u)
        return float(np.linalg.norm(_apply(T, u / nu))) if nu > 0 else 0.0

    if n == 2:
        thetas = np.linspace(0.0, math.pi, 721)
        vals = [value(np.array([math.cos(t), math.sin(t)])) for t in thetas]
        i = int(np.argmax(vals))
        step = thetas[1] - thetas[0]
        res = minimize_scalar(
            lambda t: -value(np.array([math.cos(t), math.sin(t)])),
            bounds=(thetas[i] - step, thetas[i] + step),
            method="bounded",
            options={"xatol": 1e-12},
        )
        return max(vals[i], -float(res.fun))

    rng = np.random.default_rng(seed)
    dirs = np.vstack([np.eye(n), rng.standard_normal((200 * n, n))])
    vals = np.array([value(u) for u in dirs])
    best = float(vals.max())
    for i in np.argsort(vals)[-3:]:
        res = minimize(lambda u: -value(u), dirs[i], method="Nelder-Mead", options={"xatol": 1e-8, "fatol": 1e-14})
        best = max(best, -float(res.fun))
    return best


# constants -------------------------------------------------------------------


def fit_lipschitz(problem, center, radius, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED):
    """Sampled lower estimate of the Lipschitz constant of ``f'`` on a ball.

    Maximizes ``||f'(x) - f'(y)|| / ||x - y||`` over sampled pairs and, when
    second derivatives are available, ``||f''(x)||`` over samples that
    include the points ``center +- radius e_i`` on the boundary.
    """
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    center = np.asarray(center, dtype=float)
    rng = np.random.default_rng(seed)
    xs = ball_samples(center, radius, samples, rng)
    ys = ball_samples(center, radius, samples, rng)
    best = 0.0
    for x, y in zip(xs, ys):
        gap = float(np.linalg.norm(x - y))
        if gap > 1e-12:
            diff = np.asarray(problem.jac(x), float) - np.asarray(problem.jac(y), float)
            best = max(best, float(_operator_norms(diff)) / gap)
    hess = problem.hess or (problem.poly.hessian if problem.poly is not None else None)
    if hess is not None:
        eye = np.eye(center.size)
        pts = np.vstack([xs, center + radius * eye, center - radius * eye])
        best = max(best, max(multilinear_norm(hess(x)) for x in pts))
    return best


def smale_gamma(problem, lam):
    """``max_{2 <= k <= deg} ||lam f^(k)(xbar) / k!||^(1/(k-1))``; 0 for affine ``f``."""
    if problem.poly is None:
        raise UnsupportedError("smale_gamma needs the polynomial form of f")
    xbar = problem.require_solution()
    gamma = 0.0
    for k in range(2, problem.poly.degree + 1):
        T = problem.poly.derivative_tensor(xbar, k)
        term = lam * multilinear_norm(T) / math.factorial(k)
        gamma = max(gamma, term ** (1.0 / (k - 1)))
    return gamma


# sharpness witness -------------------------------------------------------------


def extremal_problem(spec):
    """Scalar problem ``f(x) = sign(x) psi(|x|)`` with solution 0 and ``lambda = 1``.

    It satisfies the majorant inequality with equality for ``x > 0``, so its
    Newton errors coincide with the majorizing sequence. Evaluators accept
    ``Fraction`` entries for exact arithmetic.
    """
    if spec.form not in ("holder", "smale"):
        raise ValueError("extremal problems are built for Hoelder or Smale majorants")
    if spec.lam != 1:
        raise ValueError(f"extremal construction normalizes lambda = 1, got {spec.lam}")

    def sign(v):
        return int(v > 0) - int(v < 0)

    def _out(values, x):
        return np.array(values, dtype=object if np.asarray(x).dtype == object else float)

    def f(x):
        v = x[0]
        return _out([sign(v) * majorant.eval_psi(spec, abs(v))[0]], x)

    def jac(x):
        v = x[0]
        return _out([[majorant.eval_psi(spec, abs(v))[1]]], x)

    def hess(x):
        v = float(x[0])
        return np.array([[[sign(v) * majorant.eval_psi(spec, abs(v))[2]]]])

    return ProblemInstance(
        n=1,
        f=f,
        jac=jac,
        cset=SetDescriptor.zero(1),
        hess=hess,
        solution=np.zeros(1),
        kappa=spec.R,
        name=f"extremal[{spec.describe()}]",
        meta={"spec": spec},
    )


def exact_point(values):
    """Object array of ``Fraction``s for exact-arithmetic runs."""
    return np.array([Fraction(v) for v in np.atleast_1d(values)], dtype=object)
