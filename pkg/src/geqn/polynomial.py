"""Sparse multivariate polynomial maps ``R^n -> R^n`` with exact derivatives."""

import itertools
import math
from collections import defaultdict

import numpy as np


class Polynomial:
    """Vector polynomial stored as ``(component, exponents, coefficient)`` terms.

    Coefficients keep their Python type, so integer or ``Fraction``
    coefficients evaluate exactly on ``Fraction`` inputs.

    Parameters
    ----------
    n : int
        Number of variables (and of components).
    terms : iterable of (int, sequence of int, number)
    """

    def __init__(self, n, terms):
        self.n = int(n)
        merged = defaultdict(int)
        for comp, exps, coef in terms:
            exps = tuple(int(e) for e in exps)
            if not 0 <= comp < self.n:
                raise ValueError(f"component {comp} out of range for n={self.n}")
            if len(exps) != self.n or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for n={self.n}")
            merged[(int(comp), exps)] += coef
        self.terms = sorted((c, e, v) for (c, e), v in merged.items() if v != 0)

    def __repr__(self):
        return f"Polynomial(n={self.n}, terms={self.terms!r})"

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.n == other.n and self.terms == other.terms

    @property
    def degree(self):
        return max((sum(e) for _, e, _ in self.terms), default=0)

    @staticmethod
    def _monomial(x, exps):
        out = 1
        for xi, e in zip(x, exps):
            if e:
                out = out * xi**e
        return out

    def __call__(self, x):
        x = list(x)
        out = [0] * self.n
        for comp, exps, coef in self.terms:
            out[comp] = out[comp] + coef * self._monomial(x, exps)
        return _as_array(out)

    def partial(self, i):
        """Polynomial of ``d/dx_i``."""
        terms = []
        for comp, exps, coef in self.terms:
            if exps[i]:
                e = list(exps)
                e[i] -= 1
                terms.append((comp, e, coef * exps[i]))
        return Polynomial(self.n, terms)

    def jacobian(self, x):
        x = list(x)
        out = [[0] * self.n for _ in range(self.n)]
        for comp, exps, coef in self.terms:
            for i, a in enumerate(exps):
                if a:
                    e = list(exps)
                    e[i] -= 1
                    out[comp][i] = out[comp][i] + coef * a * self._monomial(x, e)
        return _as_array(out)

    def derivative_tensor(self, x, order):
        """``order``-th derivative at ``x`` as an array ``(n,) + (n,) * order``."""
        if order == 0:
            return self(x)
        if order == 1:
            return self.jacobian(x)
        x = list(x)
        shape = (self.n,) + (self.n,) * order
        out = np.zeros(shape)
        for idx in itertools.combinations_with_replacement(range(self.n), order):
            counts = [idx.count(i) for i in range(self.n)]
            vals = [0.0] * self.n
            for comp, exps, coef in self.terms:
                if any(a < c for a, c in zip(exps, counts)):
                    continue
                factor = 1
                for a, c in zip(exps, counts):
                    factor *= math.perm(a, c)
                rest = [a - c for a, c in zip(exps, counts)]
                vals[comp] += float(coef * factor * self._monomial(x, rest))
            for perm in set(itertools.permutations(idx)):
                out[(slice(None),) + perm] = vals
        return out

    def hessian(self, x):
        return self.derivative_tensor(x, 2)

    def shifted(self, s):
        """Polynomial ``g`` with ``g(y) = f(y + s)``."""
        terms = []
        for comp, exps, coef in self.terms:
            choices = [range(a + 1) for a in exps]
            for js in itertools.product(*choices):
                c = coef
                for a, j, si in zip(exps, js, s):
                    c = c * math.comb(a, j) * si ** (a - j)
                terms.append((comp, js, c))
        return Polynomial(self.n, terms)


def _as_array(values):
    arr = np.array(values, dtype=object)
    if all(isinstance(v, (int, float, np.floating, np.integer)) for v in arr.flat):
        return arr.astype(float)
    return arr
