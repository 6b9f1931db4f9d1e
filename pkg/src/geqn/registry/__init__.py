"""Built-in problems and the (problem, majorant, x0) pairs they certify.

``lambda`` values are upper bounds on the strong-regularity modulus at the
solution and ``K = lambda * L`` with ``L`` the Lipschitz constant of ``f'``;
both are re-derived in the test suite.
"""

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..checks import extremal_problem
from ..majorant import MajorantSpec
from ..problemfile import load


@dataclass(frozen=True)
class CertifiedPair:
    problem: str
    spec: MajorantSpec
    x0: tuple
    label: str = ""

    @property
    def key(self):
        return self.label or f"{self.problem}:{self.spec.describe()}"


def registry_dir():
    return Path(str(resources.files(__name__)))


def problem_names():
    return sorted(p.stem for p in registry_dir().glob("*.geqn")) + ["extremal_holder"]


def resolve(path):
    """A registry name (with or without ``.geqn``) or a filesystem path."""
    p = Path(path)
    if p.exists():
        return p
    cand = registry_dir() / (p.name if p.suffix == ".geqn" else p.name + ".geqn")
    if cand.exists():
        return cand
    raise FileNotFoundError(f"no problem file {path!r} (not a path and not in the registry)")


EXTREMAL_SPEC = MajorantSpec.holder(1, 1)


def load_problem(name):
    if name in ("extremal_holder", "extremal_holder.geqn"):
        return extremal_problem(EXTREMAL_SPEC)
    return load(resolve(name))


CERTIFIED = [
    CertifiedPair("sqrt1", MajorantSpec.holder(1, 1, lam=0.5), (0.5,)),
    CertifiedPair("sqrt1", MajorantSpec.smale(0.5, lam=0.5), (0.6,)),
    CertifiedPair("sqrt1_zero", MajorantSpec.holder(1, 1, lam=0.5), (0.5,)),
    CertifiedPair("sqrt1_zero", MajorantSpec.smale(0.5, lam=0.5), (1.4,)),
    CertifiedPair("affine_vi", MajorantSpec.holder(1, 1, lam=1.0), (1.0, 2.0)),
    CertifiedPair("ncp2", MajorantSpec.holder(1, 1, lam=0.5), (1.3, 0.1)),
    CertifiedPair("box2", MajorantSpec.holder(2.01, 1, lam=1.0), (0.8, 0.6)),
    CertifiedPair("poly1d", MajorantSpec.holder(1, 1, lam=0.5), (0.2,)),
    CertifiedPair("degen1", MajorantSpec.holder(1, 1, lam=1.0), (0.3,)),
    CertifiedPair("cubic_smale", MajorantSpec.smale(1.0, lam=1 / 3), (1.2,)),
    CertifiedPair("extremal_holder", EXTREMAL_SPEC, (0.5,)),
]
