"""Generalized equations ``f(x) + F(x) ∋ 0`` and problem-side quantities."""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import PreconditionError
from .polynomial import Polynomial
from .sets import SetDescriptor, project

SOLUTION_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """A generalized equation on ``R^n``.

    Attributes
    ----------
    n : int
    f, jac : callable
        ``f(x) -> (n,)`` and ``jac(x) -> (n, n)``.
    cset : SetDescriptor
        ``zero`` for a plain equation, otherwise ``F = N_C``.
    hess : callable, optional
        ``hess(x) -> (n, n, n)`` second-derivative tensor.
    poly : Polynomial, optional
        Exact polynomial form of ``f`` (enables all derivatives).
    solution : ndarray, optional
        Known solution ``xbar``.
    kappa : float
        Radius of a ball around ``xbar`` contained in the domain of ``f``.
    """

    n: int
    f: Callable
    jac: Callable
    cset: SetDescriptor
    hess: Optional[Callable] = None
    poly: Optional[Polynomial] = None
    solution: Optional[np.ndarray] = None
    kappa: float = math.inf
    name: str = ""
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_polynomial(cls, poly, cset, solution=None, kappa=math.inf, name="", validate=True):
        if cset.n != poly.n:
            raise ValueError(f"set dimension {cset.n} does not match polynomial dimension {poly.n}")
        sol = None if solution is None else np.asarray(solution, dtype=float)
        prob = cls(
            n=poly.n,
            f=poly,
            jac=poly.jacobian,
            cset=cset,
            hess=poly.hessian,
            poly=poly,
            solution=sol,
            kappa=kappa,
            name=name,
        )
        if validate:
            prob.validate()
        return prob

    def with_set(self, cset):
        return replace(self, cset=cset)

    def validate(self, tol=SOLUTION_TOL):
        if self.solution is None:
            return
        if self.solution.shape != (self.n,):
            raise ValueError(f"solution has shape {self.solution.shape}, expected ({self.n},)")
        res = natural_residual(self, self.solution)
        if not res <= tol:
            raise ValueError(f"solution residual {res:.1e} > {tol:.0e}")

    def require_solution(self):
        if self.solution is None:
            raise PreconditionError(f"problem {self.name or '<anonymous>'} has no known solution")
        return self.solution


def linearization_error(problem, x, y):
    """``f(y) - f(x) - f'(x)(y - x)``."""
    x = np.asarray(x)
    y = np.asarray(y)
    return problem.f(y) - problem.f(x) - problem.jac(x) @ (y - x)


def natural_residual(problem, x):
    """``||x - P_C(x - f(x))||_2`` (``||f(x)||_2`` for the zero map)."""
    fx = problem.f(x)
    if problem.cset.kind == "zero":
        r = fx
    else:
        xf = np.asarray(x, dtype=float)
        r = xf - project(problem.cset, xf - np.asarray(fx, dtype=float))
    return float(np.linalg.norm(np.asarray(r, dtype=float)))


def check_jacobian(problem, probes=8, seed=0, radius=1.0, h=1e-6):
    """Largest componentwise gap between ``jac`` and central differences of ``f``."""
    rng = np.random.default_rng(seed)
    center = problem.solution if problem.solution is not None else np.zeros(problem.n)
    if math.isfinite(problem.kappa):
        radius = min(radius, 0.5 * problem.kappa)
    worst = 0.0
    for _ in range(probes):
        x = center + radius * rng.uniform(-1, 1, problem.n) / math.sqrt(problem.n)
        J = np.asarray(problem.jac(x), dtype=float)
        for j in range(problem.n):
            e = np.zeros(problem.n)
            e[j] = h
            col = (np.asarray(problem.f(x + e), float) - np.asarray(problem.f(x - e), float)) / (2 * h)
            worst = max(worst, float(np.abs(col - J[:, j]).max()))
    return worst
