import time

import numpy as np
import pytest

from geqn import MajorantSpec, Polynomial, ProblemInstance, SetDescriptor

_CRITERIA = {}


class Criterion:
    """Records the verdict and runtime of one acceptance criterion."""

    def __init__(self, number, title, budget):
        self.number, self.title, self.budget = number, title, budget
        self.detail = ""

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.elapsed = time.perf_counter() - self.start
        ok = exc_type is None and self.elapsed < self.budget
        note = self.detail if exc is None else f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        line = f"criterion {self.number} [{'PASS' if ok else 'FAIL'}] {self.title} ({self.elapsed:.2f}s of {self.budget:g}s)"
        _CRITERIA[self.number] = line + (f" - {note}" if note else "")
        print(_CRITERIA[self.number])
        if exc_type is None:
            assert self.elapsed < self.budget, f"runtime {self.elapsed:.2f}s exceeds {self.budget}s"
        return False


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[k])


def sqrt_poly():
    return Polynomial(1, [(0, [2], 1), (0, [0], -1)])


@pytest.fixture
def sqrt_zero():
    return ProblemInstance.from_polynomial(sqrt_poly(), SetDescriptor.zero(1), [1.0], kappa=10, name="sqrt1_zero")


@pytest.fixture
def sqrt_orthant():
    return ProblemInstance.from_polynomial(sqrt_poly(), SetDescriptor.orthant(1), [1.0], kappa=10, name="sqrt1")


@pytest.fixture
def lipschitz_spec():
    return MajorantSpec.holder(1, 1, lam=0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
